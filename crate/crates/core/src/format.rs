//! Text formats for instances, matchings, and utility tables.
//!
//! ```text
//! instance   = smiw | caw
//! smiw       = "SMIW" NL "men" INT NL "women" INT NL
//!              { "man" INT ":" order NL } { "woman" INT ":" order NL }
//! caw        = "CAW" NL "students" INT NL "colleges" INT NL
//!              [ "mode" ( "additive" | "responsive" ) NL ]
//!              { "college" INT "capacity" ":" INT NL }
//!              { "student" INT ":" order NL } { "college" INT ":" order NL }
//!              { "college" INT "utility" ":" { INT ":" INT } NL }
//! order      = tier { "|" tier }
//! tier       = alt { alt }
//! alt        = INT | "_"
//! matching   = "MATCHING" NL { INT ( INT | "_" ) NL }
//! utilities  = "UTILITIES" NL { "woman" INT ":" { INT ":" INT } NL }
//! ```
//!
//! Indices are 1-based, `_` is "unmatched", `#` starts a comment, and
//! lines may come in any order after the header. Every preference line
//! lists each counterpart and `_` exactly once. Utility lines may omit
//! students; those keep their canonical utility.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::caw::{CawInstance, CawOutcome, College, GroupPreference};
use crate::order::{display_alt, Alternative, WeakOrder};
use crate::smiw::{
    canonical_utility, utility_consistent, MatchingOutcome, SmiwInstance, UtilityAssignment,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Smiw(SmiwInstance),
    Caw(CawInstance),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    UnknownHeader(String),
    UnexpectedLine(String),
    BadNumber(String),
    MissingCount(&'static str),
    DuplicateLine(String),
    MissingLine(String),
    BadToken(String),
    EmptyTier,
    UnknownIndex(usize),
    DuplicateAlternative(String),
    MissingAlternative(String),
    BadCapacity(String),
    BadMode(String),
    UtilityMismatch(String),
    UtilitiesOutsideAdditiveMode,
    OverCapacity(usize),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            MissingHeader => write!(f, "missing header line"),
            UnknownHeader(h) => write!(f, "unknown header `{h}`"),
            UnexpectedLine(l) => write!(f, "unexpected line `{l}`"),
            BadNumber(t) => write!(f, "expected a number, found `{t}`"),
            MissingCount(what) => write!(f, "missing `{what}` count"),
            DuplicateLine(what) => write!(f, "{what} is given more than once"),
            MissingLine(what) => write!(f, "no line for {what}"),
            BadToken(t) => write!(f, "unexpected token `{t}`"),
            EmptyTier => write!(f, "empty indifference tier"),
            UnknownIndex(i) => write!(f, "index {i} is out of range"),
            DuplicateAlternative(a) => write!(f, "alternative {a} is listed twice"),
            MissingAlternative(a) => {
                write!(
                    f,
                    "alternative {a} is missing; every line must rank all of them"
                )
            }
            BadCapacity(c) => write!(f, "capacity must be a positive integer, found `{c}`"),
            BadMode(m) => write!(f, "unknown mode `{m}` (expected additive or responsive)"),
            UtilityMismatch(msg) => write!(f, "utilities disagree with the preferences: {msg}"),
            UtilitiesOutsideAdditiveMode => {
                write!(f, "utility lines require additive mode")
            }
            OverCapacity(j) => write!(f, "college {j} is over capacity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

type Parsed<T> = std::result::Result<T, ParseError>;

fn err<T>(line: usize, column: usize, kind: ParseErrorKind) -> Parsed<T> {
    Err(ParseError { line, column, kind })
}

/// A comment-stripped, nonblank line split into whitespace tokens with
/// 1-based columns.
#[derive(Debug)]
struct Line<'a> {
    no: usize,
    tokens: Vec<(usize, &'a str)>,
    end: usize,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (at, ch) in content.char_indices() {
            let special = ch == '|' || ch == ':';
            if ch.is_whitespace() || special {
                if let Some(s) = start.take() {
                    tokens.push((s + 1, &content[s..at]));
                }
                if special {
                    tokens.push((at + 1, &content[at..at + 1]));
                }
            } else if start.is_none() {
                start = Some(at);
            }
        }
        if let Some(s) = start {
            tokens.push((s + 1, &content[s..]));
        }
        if !tokens.is_empty() {
            lines.push(Line {
                no: k + 1,
                tokens,
                end: content.trim_end().len() + 1,
            });
        }
    }
    lines
}

fn number(line: &Line, at: usize) -> Parsed<usize> {
    match line.tokens.get(at) {
        Some(&(col, tok)) => tok
            .parse()
            .or_else(|_| err(line.no, col, ParseErrorKind::BadNumber(tok.to_string()))),
        None => err(line.no, line.end, ParseErrorKind::BadNumber(String::new())),
    }
}

fn integer(line: usize, col: usize, tok: &str) -> Parsed<i64> {
    tok.parse()
        .or_else(|_| err(line, col, ParseErrorKind::BadNumber(tok.to_string())))
}

/// 1-based index in `1..=n`, returned 0-based.
fn index(line: &Line, at: usize, n: usize) -> Parsed<usize> {
    let i = number(line, at)?;
    if i == 0 || i > n {
        return err(line.no, line.tokens[at].0, ParseErrorKind::UnknownIndex(i));
    }
    Ok(i - 1)
}

fn expect(line: &Line, at: usize, want: &str) -> Parsed<()> {
    match line.tokens.get(at) {
        Some(&(_, tok)) if tok == want => Ok(()),
        Some(&(col, tok)) => err(line.no, col, ParseErrorKind::BadToken(tok.to_string())),
        None => err(line.no, line.end, ParseErrorKind::BadToken(String::new())),
    }
}

fn expect_end(line: &Line, at: usize) -> Parsed<()> {
    match line.tokens.get(at) {
        None => Ok(()),
        Some(&(col, tok)) => err(line.no, col, ParseErrorKind::BadToken(tok.to_string())),
    }
}

/// Parses the tokens of `line` from `at` on as a weak order over `n`
/// counterparts.
fn order(line: &Line, at: usize, n: usize) -> Parsed<WeakOrder> {
    let mut tiers: Vec<Vec<Alternative>> = vec![Vec::new()];
    let mut seen = vec![false; n + 1];
    let mut last_col = line.end;
    for &(col, tok) in &line.tokens[at..] {
        last_col = col;
        if tok == "|" {
            if tiers.last().is_some_and(Vec::is_empty) {
                return err(line.no, col, ParseErrorKind::EmptyTier);
            }
            tiers.push(Vec::new());
            continue;
        }
        let alt = if tok == "_" {
            None
        } else {
            let i: usize = tok
                .parse()
                .or_else(|_| err(line.no, col, ParseErrorKind::BadToken(tok.to_string())))?;
            if i == 0 || i > n {
                return err(line.no, col, ParseErrorKind::UnknownIndex(i));
            }
            Some(i - 1)
        };
        let slot = alt.unwrap_or(n);
        if std::mem::replace(&mut seen[slot], true) {
            return err(
                line.no,
                col,
                ParseErrorKind::DuplicateAlternative(display_alt(alt)),
            );
        }
        tiers.last_mut().expect("nonempty").push(alt);
    }
    if tiers.last().is_some_and(Vec::is_empty) {
        return err(line.no, last_col, ParseErrorKind::EmptyTier);
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        let alt = (missing < n).then_some(missing);
        return err(
            line.no,
            line.end,
            ParseErrorKind::MissingAlternative(display_alt(alt)),
        );
    }
    Ok(WeakOrder::new(n, tiers).expect("validated above"))
}

/// `i:v` pairs from `at` on; returns 0-based indices.
fn utility_pairs(line: &Line, at: usize, n: usize) -> Parsed<Vec<(usize, i64, usize)>> {
    let toks = &line.tokens[at..];
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    let mut k = 0;
    while k < toks.len() {
        let (col, tok) = toks[k];
        let i: usize = tok
            .parse()
            .or_else(|_| err(line.no, col, ParseErrorKind::BadNumber(tok.to_string())))?;
        if i == 0 || i > n {
            return err(line.no, col, ParseErrorKind::UnknownIndex(i));
        }
        if std::mem::replace(&mut seen[i - 1], true) {
            return err(
                line.no,
                col,
                ParseErrorKind::DuplicateAlternative(i.to_string()),
            );
        }
        match toks.get(k + 1) {
            Some(&(_, ":")) => {}
            Some(&(c, t)) => return err(line.no, c, ParseErrorKind::BadToken(t.to_string())),
            None => return err(line.no, line.end, ParseErrorKind::BadToken(String::new())),
        }
        let &(vcol, vtok) = toks.get(k + 2).ok_or(ParseError {
            line: line.no,
            column: line.end,
            kind: ParseErrorKind::BadNumber(String::new()),
        })?;
        out.push((i - 1, integer(line.no, vcol, vtok)?, col));
        k += 3;
    }
    Ok(out)
}

/// Collects one line per index, reporting duplicates and gaps.
struct Slots<'a, T> {
    what: &'static str,
    items: Vec<Option<T>>,
    header: &'a Line<'a>,
}

impl<'a, T> Slots<'a, T> {
    fn new(what: &'static str, n: usize, header: &'a Line<'a>) -> Self {
        Self {
            what,
            items: (0..n).map(|_| None).collect(),
            header,
        }
    }

    fn put(&mut self, line: &Line, i: usize, value: T) -> Parsed<()> {
        if self.items[i].is_some() {
            return err(
                line.no,
                line.tokens[0].0,
                ParseErrorKind::DuplicateLine(format!("{} {}", self.what, i + 1)),
            );
        }
        self.items[i] = Some(value);
        Ok(())
    }

    fn finish(self) -> Parsed<Vec<T>> {
        let mut out = Vec::with_capacity(self.items.len());
        for (i, item) in self.items.into_iter().enumerate() {
            match item {
                Some(v) => out.push(v),
                None => {
                    return err(
                        self.header.no,
                        1,
                        ParseErrorKind::MissingLine(format!("{} {}", self.what, i + 1)),
                    )
                }
            }
        }
        Ok(out)
    }
}

/// Finds the `keyword N` count line.
fn count(lines: &[Line], header: &Line, keyword: &'static str) -> Parsed<usize> {
    let mut found = None;
    for line in lines.iter().filter(|l| l.tokens[0].1 == keyword) {
        if found.is_some() {
            return err(
                line.no,
                1,
                ParseErrorKind::DuplicateLine(format!("`{keyword}` count")),
            );
        }
        expect_end(line, 2)?;
        found = Some(number(line, 1)?);
    }
    found.ok_or(ParseError {
        line: header.no,
        column: 1,
        kind: ParseErrorKind::MissingCount(keyword),
    })
}

pub fn parse_instance(text: &str) -> Parsed<Instance> {
    let lines = tokenize(text);
    let Some((header, body)) = lines.split_first() else {
        return err(1, 1, ParseErrorKind::MissingHeader);
    };
    match header.tokens[0].1 {
        "SMIW" => {
            expect_end(header, 1)?;
            parse_smiw(header, body).map(Instance::Smiw)
        }
        "CAW" => {
            expect_end(header, 1)?;
            parse_caw(header, body).map(Instance::Caw)
        }
        other => err(
            header.no,
            header.tokens[0].0,
            ParseErrorKind::UnknownHeader(other.to_string()),
        ),
    }
}

fn unexpected<T>(line: &Line) -> Parsed<T> {
    err(
        line.no,
        line.tokens[0].0,
        ParseErrorKind::UnexpectedLine(
            line.tokens
                .iter()
                .map(|t| t.1)
                .collect::<Vec<_>>()
                .join(" "),
        ),
    )
}

fn parse_smiw(header: &Line, body: &[Line]) -> Parsed<SmiwInstance> {
    let n_men = count(body, header, "men")?;
    let n_women = count(body, header, "women")?;
    let mut men = Slots::new("man", n_men, header);
    let mut women = Slots::new("woman", n_women, header);
    for line in body {
        match line.tokens[0].1 {
            "men" | "women" => {}
            "man" => {
                let i = index(line, 1, n_men)?;
                expect(line, 2, ":")?;
                men.put(line, i, order(line, 3, n_women)?)?;
            }
            "woman" => {
                let j = index(line, 1, n_women)?;
                expect(line, 2, ":")?;
                women.put(line, j, order(line, 3, n_men)?)?;
            }
            _ => return unexpected(line),
        }
    }
    Ok(SmiwInstance::new(men.finish()?, women.finish()?).expect("dimensions checked"))
}

/// A `college j utility:` line with its `(student, value, column)` entries.
type UtilityLine<'a> = (&'a Line<'a>, Vec<(usize, i64, usize)>);

fn parse_caw(header: &Line, body: &[Line]) -> Parsed<CawInstance> {
    let n_students = count(body, header, "students")?;
    let n_colleges = count(body, header, "colleges")?;
    let mut mode = None;
    let mut students = Slots::new("student", n_students, header);
    let mut orders = Slots::new("college", n_colleges, header);
    let mut capacities = Slots::new("college capacity", n_colleges, header);
    let mut utility_lines: Vec<Option<UtilityLine>> = (0..n_colleges).map(|_| None).collect();
    for line in body {
        match line.tokens[0].1 {
            "students" | "colleges" => {}
            "mode" => {
                if mode.is_some() {
                    return err(line.no, 1, ParseErrorKind::DuplicateLine("mode".into()));
                }
                let (col, tok) = *line.tokens.get(1).ok_or(ParseError {
                    line: line.no,
                    column: line.end,
                    kind: ParseErrorKind::BadMode(String::new()),
                })?;
                mode = Some((
                    line.no,
                    match tok {
                        "additive" => GroupPreference::AdditiveUtility,
                        "responsive" => GroupPreference::MinimallyResponsive,
                        other => return err(line.no, col, ParseErrorKind::BadMode(other.into())),
                    },
                ));
                expect_end(line, 2)?;
            }
            "student" => {
                let i = index(line, 1, n_students)?;
                expect(line, 2, ":")?;
                students.put(line, i, order(line, 3, n_colleges)?)?;
            }
            "college" => {
                let j = index(line, 1, n_colleges)?;
                match line.tokens.get(2).map(|t| t.1) {
                    Some(":") => orders.put(line, j, order(line, 3, n_students)?)?,
                    Some("capacity") => {
                        expect(line, 3, ":")?;
                        let (col, tok) = *line.tokens.get(4).ok_or(ParseError {
                            line: line.no,
                            column: line.end,
                            kind: ParseErrorKind::BadCapacity(String::new()),
                        })?;
                        let cap: usize = match tok.parse() {
                            Ok(c) if c > 0 => c,
                            _ => return err(line.no, col, ParseErrorKind::BadCapacity(tok.into())),
                        };
                        expect_end(line, 5)?;
                        capacities.put(line, j, cap)?;
                    }
                    Some("utility") => {
                        expect(line, 3, ":")?;
                        if utility_lines[j].is_some() {
                            return err(
                                line.no,
                                1,
                                ParseErrorKind::DuplicateLine(format!("college {} utility", j + 1)),
                            );
                        }
                        utility_lines[j] = Some((line, utility_pairs(line, 4, n_students)?));
                    }
                    _ => return unexpected(line),
                }
            }
            _ => return unexpected(line),
        }
    }
    let students = students.finish()?;
    let orders = orders.finish()?;
    let capacities = capacities.finish()?;
    let any_utilities = utility_lines.iter().any(Option::is_some);
    let mode = match mode {
        Some((no, GroupPreference::MinimallyResponsive)) if any_utilities => {
            return err(no, 1, ParseErrorKind::UtilitiesOutsideAdditiveMode)
        }
        Some((_, m)) => m,
        None if any_utilities => GroupPreference::AdditiveUtility,
        None => GroupPreference::MinimallyResponsive,
    };
    let mut colleges = Vec::with_capacity(n_colleges);
    for ((order, capacity), given) in orders.into_iter().zip(capacities).zip(utility_lines) {
        let utilities = match given {
            None => None,
            Some((line, pairs)) => {
                let mut utility = canonical_utility(&order);
                for &(i, v, _) in &pairs {
                    utility[i] = v;
                }
                if !utility_consistent(&order, &utility) {
                    return err(
                        line.no,
                        line.tokens[0].0,
                        ParseErrorKind::UtilityMismatch(format!("college line `{}`", order)),
                    );
                }
                Some(utility)
            }
        };
        colleges.push(College {
            order,
            capacity,
            utilities,
        });
    }
    Ok(CawInstance::new(students, colleges, mode).expect("validated while parsing"))
}

fn utility_text(utility: &[i64]) -> String {
    utility
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{}:{v}", i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical text of an instance; `parse_instance` inverts it.
pub fn emit_instance(instance: &Instance) -> String {
    let mut out = String::new();
    match instance {
        Instance::Smiw(x) => {
            let _ = writeln!(out, "SMIW\nmen {}\nwomen {}", x.n_men(), x.n_women());
            for (i, o) in x.men().iter().enumerate() {
                let _ = writeln!(out, "man {}: {o}", i + 1);
            }
            for (j, o) in x.women().iter().enumerate() {
                let _ = writeln!(out, "woman {}: {o}", j + 1);
            }
        }
        Instance::Caw(x) => {
            let _ = writeln!(
                out,
                "CAW\nstudents {}\ncolleges {}",
                x.n_students(),
                x.n_colleges()
            );
            if x.mode() == GroupPreference::AdditiveUtility {
                out.push_str("mode additive\n");
            }
            for (j, c) in x.colleges().iter().enumerate() {
                let _ = writeln!(out, "college {} capacity: {}", j + 1, c.capacity);
            }
            for (i, o) in x.students().iter().enumerate() {
                let _ = writeln!(out, "student {}: {o}", i + 1);
            }
            for (j, c) in x.colleges().iter().enumerate() {
                let _ = writeln!(out, "college {}: {}", j + 1, c.order);
            }
            for (j, c) in x.colleges().iter().enumerate() {
                if let Some(u) = &c.utilities {
                    let _ = writeln!(out, "college {} utility: {}", j + 1, utility_text(u));
                }
            }
        }
    }
    out
}

/// `MATCHING` followed by one `<i> <j|_>` line per left-side agent.
pub fn emit_matching(assignment: &[Option<usize>]) -> String {
    let mut out = String::from("MATCHING\n");
    for (i, &slot) in assignment.iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, display_alt(slot));
    }
    out
}

/// Matching blocks separated by blank lines.
pub fn emit_matching_set<'a>(assignments: impl IntoIterator<Item = &'a [Option<usize>]>) -> String {
    assignments
        .into_iter()
        .map(emit_matching)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses a matching file for a market with `left` agents on the proposing
/// side and `right` on the other. Unlisted agents are unmatched.
pub fn parse_assignment(text: &str, left: usize, right: usize) -> Parsed<Vec<Option<usize>>> {
    let lines = tokenize(text);
    let Some((header, body)) = lines.split_first() else {
        return err(1, 1, ParseErrorKind::MissingHeader);
    };
    if header.tokens[0].1 != "MATCHING" {
        return err(
            header.no,
            header.tokens[0].0,
            ParseErrorKind::UnknownHeader(header.tokens[0].1.to_string()),
        );
    }
    expect_end(header, 1)?;
    let mut seen = vec![false; left];
    let mut assignment = vec![None; left];
    for line in body {
        let i = index(line, 0, left)?;
        if std::mem::replace(&mut seen[i], true) {
            return err(
                line.no,
                line.tokens[0].0,
                ParseErrorKind::DuplicateLine(format!("agent {}", i + 1)),
            );
        }
        match line.tokens.get(1) {
            Some(&(_, "_")) => {}
            Some(_) => assignment[i] = Some(index(line, 1, right)?),
            None => return err(line.no, line.end, ParseErrorKind::BadToken(String::new())),
        }
        expect_end(line, 2)?;
    }
    Ok(assignment)
}

pub fn parse_smiw_matching(text: &str, instance: &SmiwInstance) -> Parsed<MatchingOutcome> {
    let assignment = parse_assignment(text, instance.n_men(), instance.n_women())?;
    let mut holder: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, slot) in assignment.iter().enumerate() {
        if let Some(j) = *slot {
            if holder.insert(j, i).is_some() {
                return err(
                    1,
                    1,
                    ParseErrorKind::DuplicateLine(format!("woman {}", j + 1)),
                );
            }
        }
    }
    Ok(MatchingOutcome::new(instance.n_women(), assignment).expect("checked above"))
}

pub fn parse_caw_matching(text: &str, instance: &CawInstance) -> Parsed<CawOutcome> {
    let assignment = parse_assignment(text, instance.n_students(), instance.n_colleges())?;
    let mut load = vec![0usize; instance.n_colleges()];
    for &j in assignment.iter().flatten() {
        load[j] += 1;
        if load[j] > instance.colleges()[j].capacity {
            return err(1, 1, ParseErrorKind::OverCapacity(j + 1));
        }
    }
    Ok(CawOutcome::new(instance, assignment).expect("checked above"))
}

/// Parses a `UTILITIES` file for `instance`; unlisted pairs keep the
/// canonical utility.
pub fn parse_utilities(text: &str, instance: &SmiwInstance) -> Parsed<UtilityAssignment> {
    let lines = tokenize(text);
    let Some((header, body)) = lines.split_first() else {
        return err(1, 1, ParseErrorKind::MissingHeader);
    };
    if header.tokens[0].1 != "UTILITIES" {
        return err(
            header.no,
            header.tokens[0].0,
            ParseErrorKind::UnknownHeader(header.tokens[0].1.to_string()),
        );
    }
    let mut per_woman: Vec<Vec<i64>> = instance.women().iter().map(canonical_utility).collect();
    let mut seen = vec![false; instance.n_women()];
    for line in body {
        if line.tokens[0].1 != "woman" {
            return unexpected(line);
        }
        let j = index(line, 1, instance.n_women())?;
        expect(line, 2, ":")?;
        if std::mem::replace(&mut seen[j], true) {
            return err(
                line.no,
                1,
                ParseErrorKind::DuplicateLine(format!("woman {}", j + 1)),
            );
        }
        for (i, v, _) in utility_pairs(line, 3, instance.n_men())? {
            per_woman[j][i] = v;
        }
        if !utility_consistent(&instance.women()[j], &per_woman[j]) {
            return err(
                line.no,
                1,
                ParseErrorKind::UtilityMismatch(format!("woman {}", j + 1)),
            );
        }
    }
    Ok(UtilityAssignment::new(per_woman))
}

pub fn emit_utilities(utilities: &UtilityAssignment) -> String {
    let mut out = String::from("UTILITIES\n");
    for (j, u) in utilities.per_woman().iter().enumerate() {
        let _ = writeln!(out, "woman {}: {}", j + 1, utility_text(u));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = "SMIW\nmen 1\nwomen 1\nman 1: 1 | _\nwoman 1: 1 | _\n";

    #[test]
    fn parses_and_emits_one_by_one() {
        let parsed = parse_instance(ONE).unwrap();
        assert_eq!(emit_instance(&parsed), ONE);
    }

    #[test]
    fn comments_and_order_are_free() {
        let text =
            "# header next\nSMIW\nwoman 1: 1 | _  # trailing\n\nmen 1\nman 1: 1 | _\nwomen 1\n";
        assert_eq!(parse_instance(text).unwrap(), parse_instance(ONE).unwrap());
    }

    fn kind(text: &str) -> (usize, usize, ParseErrorKind) {
        let e = parse_instance(text).unwrap_err();
        (e.line, e.column, e.kind)
    }

    #[test]
    fn distinct_diagnostics() {
        assert_eq!(
            kind("SMIW\nmen 1\nwomen 1\nman 1: 1\nwoman 1: 1 | _\n"),
            (4, 9, ParseErrorKind::MissingAlternative("_".into()))
        );
        assert_eq!(
            kind("SMIW\nmen 1\nwomen 1\nman 1: 1 1 | _\nwoman 1: 1 | _\n"),
            (4, 10, ParseErrorKind::DuplicateAlternative("1".into()))
        );
        assert_eq!(
            kind("SMIW\nmen 1\nwomen 1\nman 1: 2 | _\nwoman 1: 1 | _\n"),
            (4, 8, ParseErrorKind::UnknownIndex(2))
        );
        assert_eq!(
            kind("CAW\nstudents 1\ncolleges 1\ncollege 1 capacity: 0\nstudent 1: 1 _\ncollege 1: 1 _\n").2,
            ParseErrorKind::BadCapacity("0".into())
        );
        assert_eq!(
            kind("SMIW\nmen 1\nwomen 1\nman 1: 1 | | _\nwoman 1: 1 | _\n").2,
            ParseErrorKind::EmptyTier
        );
        assert_eq!(
            kind("SMIW\nmen 1\nwomen 1\nman 1: 1 | _\n").2,
            ParseErrorKind::MissingLine("woman 1".into())
        );
        assert_eq!(kind("").2, ParseErrorKind::MissingHeader);
    }

    #[test]
    fn caw_utilities_default_to_canonical() {
        let text = "CAW\nstudents 2\ncolleges 1\ncollege 1 capacity: 2\nstudent 1: 1 | _\nstudent 2: 1 | _\ncollege 1: 1 | 2 | _\ncollege 1 utility: 1:10\n";
        let Instance::Caw(x) = parse_instance(text).unwrap() else {
            panic!("expected CAW");
        };
        assert_eq!(x.mode(), GroupPreference::AdditiveUtility);
        assert_eq!(x.colleges()[0].utilities, Some(vec![10, 1]));
        let again = parse_instance(&emit_instance(&Instance::Caw(x.clone()))).unwrap();
        assert_eq!(again, Instance::Caw(x));
    }

    #[test]
    fn inconsistent_utilities_rejected() {
        let text = "CAW\nstudents 2\ncolleges 1\ncollege 1 capacity: 2\nstudent 1: 1 | _\nstudent 2: 1 | _\ncollege 1: 1 | 2 | _\ncollege 1 utility: 1:1 2:1\n";
        assert!(matches!(kind(text).2, ParseErrorKind::UtilityMismatch(_)));
    }

    #[test]
    fn matching_round_trip() {
        let assignment = vec![Some(1), None, Some(0)];
        let text = emit_matching(&assignment);
        assert_eq!(text, "MATCHING\n1 2\n2 _\n3 1\n");
        assert_eq!(parse_assignment(&text, 3, 2).unwrap(), assignment);
        assert!(parse_assignment("MATCHING\n1 3\n", 3, 2).is_err());
    }
}
