//! Worked instances shared by unit tests.

use crate::model::{Instance, OwaVector, UtilityMatrix};

/// Six agents in three groups of identical Borda utilities.
pub fn example1_utilities() -> UtilityMatrix {
    let a = [5, 4, 3, 0, 2, 1];
    let b = [4, 0, 2, 3, 1, 5];
    let c = [0, 3, 2, 4, 5, 1];
    UtilityMatrix::from_integers(&[a, a, a, b, b, c]).unwrap()
}

pub fn example1_instance(alpha: &[i64]) -> Instance {
    Instance::new(example1_utilities(), OwaVector::from_integers(alpha).unwrap()).unwrap()
}

/// Three agents, six items, with ties.
pub fn exjl_utilities() -> UtilityMatrix {
    UtilityMatrix::from_integers(&[
        [10, 10, 9, 8, 5, 0],
        [6, 5, 0, 10, 8, 10],
        [8, 0, 10, 6, 10, 7],
    ])
    .unwrap()
}

pub fn exjl_instance(alpha: &[i64]) -> Instance {
    Instance::new(exjl_utilities(), OwaVector::from_integers(alpha).unwrap()).unwrap()
}
