//! College admissions with weak preferences.
//!
//! Each college seat becomes a woman carrying the college's preferences and
//! utilities; students become men who are indifferent among the seats of one
//! college. The SMIW mechanism then runs on the seat market and seats are
//! folded back into rosters.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::order::WeakOrder;
use crate::smiw::{
    canonical_utility, solve_smiw_with, utility_consistent, MatchingOutcome, SmiwInstance,
    UtilityAssignment,
};

/// How a college compares sets of students.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupPreference {
    /// Minimally responsive to the college's order over individuals.
    #[default]
    MinimallyResponsive,
    /// Sets compared by the sum of per-student utilities.
    AdditiveUtility,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct College {
    pub order: WeakOrder,
    pub capacity: usize,
    /// Explicit per-student utilities; only allowed in additive mode.
    pub utilities: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CawInstance {
    students: Vec<WeakOrder>,
    colleges: Vec<College>,
    mode: GroupPreference,
}

impl CawInstance {
    pub fn new(
        students: Vec<WeakOrder>,
        colleges: Vec<College>,
        mode: GroupPreference,
    ) -> Result<Self> {
        if let Some(i) = students.iter().position(|o| o.agents() != colleges.len()) {
            return Err(Error::InvalidInput(format!(
                "student {} ranks {} colleges, expected {}",
                i + 1,
                students[i].agents(),
                colleges.len()
            )));
        }
        for (j, college) in colleges.iter().enumerate() {
            if college.order.agents() != students.len() {
                return Err(Error::InvalidInput(format!(
                    "college {} ranks {} students, expected {}",
                    j + 1,
                    college.order.agents(),
                    students.len()
                )));
            }
            if college.capacity == 0 {
                return Err(Error::InvalidInput(format!(
                    "college {} has capacity 0",
                    j + 1
                )));
            }
            if let Some(utility) = &college.utilities {
                if mode != GroupPreference::AdditiveUtility {
                    return Err(Error::InvalidInput(format!(
                        "college {} has explicit utilities outside additive mode",
                        j + 1
                    )));
                }
                if !utility_consistent(&college.order, utility) {
                    return Err(Error::InvalidInput(format!(
                        "utilities of college {} disagree with its preferences",
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            students,
            colleges,
            mode,
        })
    }

    pub fn students(&self) -> &[WeakOrder] {
        &self.students
    }

    pub fn colleges(&self) -> &[College] {
        &self.colleges
    }

    pub fn mode(&self) -> GroupPreference {
        self.mode
    }

    pub fn n_students(&self) -> usize {
        self.students.len()
    }

    pub fn n_colleges(&self) -> usize {
        self.colleges.len()
    }

    pub fn total_capacity(&self) -> usize {
        self.colleges.iter().map(|c| c.capacity).sum()
    }

    pub fn with_student_order(&self, i: usize, order: WeakOrder) -> Result<Self> {
        let mut students = self.students.clone();
        students[i] = order;
        Self::new(students, self.colleges.clone(), self.mode)
    }

    /// Utility table of college `j`: the explicit one or the canonical one.
    pub fn utility(&self, j: usize) -> Vec<i64> {
        let college = &self.colleges[j];
        college
            .utilities
            .clone()
            .unwrap_or_else(|| canonical_utility(&college.order))
    }

    pub fn is_individually_rational(&self, outcome: &CawOutcome) -> bool {
        outcome.assignment.iter().enumerate().all(|(i, slot)| {
            slot.is_none_or(|j| {
                self.students[i].is_acceptable(j) && self.colleges[j].order.is_acceptable(i)
            })
        })
    }

    /// Sum of college `j`'s utilities over `roster`.
    pub fn roster_utility(&self, j: usize, roster: &BTreeSet<usize>) -> i64 {
        let utility = self.utility(j);
        roster.iter().map(|&i| utility[i]).sum()
    }

    /// Students weakly better off and every college's utility sum weakly
    /// higher under `a` than under `b`.
    pub fn weakly_better(&self, a: &CawOutcome, b: &CawOutcome) -> bool {
        (0..self.n_students())
            .all(|i| self.students[i].weakly_prefers(a.college_of(i), b.college_of(i)))
            && (0..self.n_colleges()).all(|j| {
                self.roster_utility(j, &a.rosters[j]) >= self.roster_utility(j, &b.rosters[j])
            })
    }

    /// Pareto dominance under additive group preferences.
    pub fn pareto_dominates(&self, a: &CawOutcome, b: &CawOutcome) -> bool {
        self.weakly_better(a, b) && !self.weakly_better(b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CawOutcome {
    assignment: Vec<Option<usize>>,
    rosters: Vec<BTreeSet<usize>>,
}

impl CawOutcome {
    /// Builds an outcome from a student-to-college assignment, checking
    /// capacities.
    pub fn new(instance: &CawInstance, assignment: Vec<Option<usize>>) -> Result<Self> {
        if assignment.len() != instance.n_students() {
            return Err(Error::InvalidInput(format!(
                "assignment lists {} students, instance has {}",
                assignment.len(),
                instance.n_students()
            )));
        }
        let mut rosters = vec![BTreeSet::new(); instance.n_colleges()];
        for (i, slot) in assignment.iter().enumerate() {
            if let Some(j) = *slot {
                let roster = rosters.get_mut(j).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "student {} is assigned to unknown college {}",
                        i + 1,
                        j + 1
                    ))
                })?;
                roster.insert(i);
            }
        }
        for (j, roster) in rosters.iter().enumerate() {
            if roster.len() > instance.colleges[j].capacity {
                return Err(Error::InvalidInput(format!(
                    "college {} admits {} students over capacity {}",
                    j + 1,
                    roster.len(),
                    instance.colleges[j].capacity
                )));
            }
        }
        Ok(Self {
            assignment,
            rosters,
        })
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn college_of(&self, student: usize) -> Option<usize> {
        self.assignment[student]
    }

    pub fn rosters(&self) -> &[BTreeSet<usize>] {
        &self.rosters
    }

    pub fn roster(&self, college: usize) -> &BTreeSet<usize> {
        &self.rosters[college]
    }
}

/// Seat market for a CAW instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeatExpansion {
    pub smiw: SmiwInstance,
    pub utilities: UtilityAssignment,
    /// College owning each seat (woman) of `smiw`.
    pub seat_college: Vec<usize>,
}

impl SeatExpansion {
    pub fn fold(&self, instance: &CawInstance, seats: &MatchingOutcome) -> Result<CawOutcome> {
        let assignment = seats
            .assignment()
            .iter()
            .map(|slot| slot.map(|w| self.seat_college[w]))
            .collect();
        CawOutcome::new(instance, assignment)
    }
}

/// One man per student, `c_q` identical women per college `q`; seats of one
/// college share the college's utility function.
pub fn expand_to_smiw(instance: &CawInstance) -> SeatExpansion {
    let capacities: Vec<usize> = instance.colleges.iter().map(|c| c.capacity).collect();
    let men = instance
        .students
        .iter()
        .map(|o| o.expanded(&capacities))
        .collect();
    let mut women = Vec::new();
    let mut per_woman = Vec::new();
    let mut seat_college = Vec::new();
    for (j, college) in instance.colleges.iter().enumerate() {
        let utility = instance.utility(j);
        for _ in 0..college.capacity {
            women.push(college.order.clone());
            per_woman.push(utility.clone());
            seat_college.push(j);
        }
    }
    SeatExpansion {
        smiw: SmiwInstance::new(men, women).expect("expansion is well-formed"),
        utilities: UtilityAssignment::new(per_woman),
        seat_college,
    }
}

/// Solves the instance and returns the outcome with the seat-level matching.
pub fn solve_caw_detailed(
    instance: &CawInstance,
) -> Result<(CawOutcome, SeatExpansion, MatchingOutcome)> {
    let expansion = expand_to_smiw(instance);
    let seats = solve_smiw_with(&expansion.smiw, &expansion.utilities)?;
    let outcome = expansion.fold(instance, &seats)?;
    Ok((outcome, expansion, seats))
}

pub fn solve_caw(instance: &CawInstance) -> Result<CawOutcome> {
    solve_caw_detailed(instance).map(|(outcome, _, _)| outcome)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CawViolation {
    OverCapacity {
        college: usize,
        admitted: usize,
    },
    StudentFindsUnacceptable {
        student: usize,
        college: usize,
    },
    CollegeFindsUnacceptable {
        student: usize,
        college: usize,
    },
    /// Condition (1): the college strictly prefers the student to someone
    /// it admitted.
    BlockingDisplace {
        student: usize,
        college: usize,
        displaced: usize,
    },
    /// Condition (2): the college has a free seat and finds the student
    /// strictly acceptable.
    BlockingVacancy {
        student: usize,
        college: usize,
    },
}

/// Lists capacity, individual rationality, and strongly-blocking-pair
/// violations. Empty iff the outcome is weakly stable.
pub fn caw_weak_stability_check(instance: &CawInstance, outcome: &CawOutcome) -> Vec<CawViolation> {
    let mut violations = Vec::new();
    for (j, roster) in outcome.rosters.iter().enumerate() {
        if roster.len() > instance.colleges[j].capacity {
            violations.push(CawViolation::OverCapacity {
                college: j,
                admitted: roster.len(),
            });
        }
    }
    for (i, slot) in outcome.assignment.iter().enumerate() {
        if let Some(j) = *slot {
            if !instance.students[i].is_acceptable(j) {
                violations.push(CawViolation::StudentFindsUnacceptable {
                    student: i,
                    college: j,
                });
            }
            if !instance.colleges[j].order.is_acceptable(i) {
                violations.push(CawViolation::CollegeFindsUnacceptable {
                    student: i,
                    college: j,
                });
            }
        }
    }
    for (i, student) in instance.students.iter().enumerate() {
        for (j, college) in instance.colleges.iter().enumerate() {
            if !student.prefers(Some(j), outcome.college_of(i)) {
                continue;
            }
            let roster = &outcome.rosters[j];
            if let Some(&displaced) = roster
                .iter()
                .find(|&&p| college.order.prefers(Some(i), Some(p)))
            {
                violations.push(CawViolation::BlockingDisplace {
                    student: i,
                    college: j,
                    displaced,
                });
            } else if roster.len() < college.capacity && college.order.prefers(Some(i), None) {
                violations.push(CawViolation::BlockingVacancy {
                    student: i,
                    college: j,
                });
            }
        }
    }
    violations
}
