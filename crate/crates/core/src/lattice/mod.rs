//! Exact integer linear algebra, reflections and finite matrix groups.

pub mod group;
pub mod matrix;
pub mod reflection;
pub mod smith;

pub use group::{generate_group, FiniteMatrixGroup, GroupElement, GroupTable, MatrixGroup, DEFAULT_CAP};
pub use matrix::{IntMatrix, IntVector};
pub use reflection::{
    conjugate_marking, eigenlattice, is_reflection, is_trivial_mod2, markings_of, Reflection, Sign,
    StrictMarking,
};

use crate::error::Result;

/// All reflections of the group, in element order, paired with their element index.
pub fn reflections_in(group: &FiniteMatrixGroup) -> Vec<(usize, Reflection)> {
    group
        .elements()
        .iter()
        .enumerate()
        .filter_map(|(i, m)| match is_reflection(m) {
            Ok(true) => Some((i, Reflection { matrix: m.clone(), trivial_mod2: is_trivial_mod2(m) })),
            _ => None,
        })
        .collect()
}

pub fn reflection_indices(group: &FiniteMatrixGroup) -> Vec<usize> {
    reflections_in(group).into_iter().map(|(i, _)| i).collect()
}

/// Conjugacy classes of reflections, as lists of element indices, ordered by smallest member.
pub fn reflection_classes(group: &FiniteMatrixGroup, reflections: &[usize]) -> Result<Vec<Vec<usize>>> {
    let t = group.table();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &r in reflections {
        if seen.contains(&r) {
            continue;
        }
        let class = t.conjugacy_class(r);
        seen.extend(class.iter().copied());
        classes.push(class);
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_counts() {
        let neg = generate_group(1, &[IntMatrix::from_rows(&[vec![-1]]).unwrap()], 10).unwrap();
        assert_eq!(reflections_in(&neg).len(), 1);
        // W(A2) on the coroot lattice.
        let s1 = IntMatrix::from_rows(&[vec![-1, 1], vec![0, 1]]).unwrap();
        let s2 = IntMatrix::from_rows(&[vec![1, 0], vec![1, -1]]).unwrap();
        let a2 = generate_group(2, &[s1, s2], 100).unwrap();
        assert_eq!(a2.order(), 6);
        assert_eq!(reflections_in(&a2).len(), 3);
        let b2 = generate_group(
            2,
            &[
                IntMatrix::from_rows(&[vec![-1, 0], vec![0, 1]]).unwrap(),
                IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap(),
            ],
            100,
        )
        .unwrap();
        let refl = reflection_indices(&b2);
        assert_eq!(refl.len(), 4);
        assert_eq!(reflection_classes(&b2, &refl).unwrap().len(), 2);
    }
}
