//! Finite categories presented by explicit composition tables.
//!
//! A category value carries object names, morphism data, identity indices,
//! and a full composition table; the constructor checks every law by
//! enumeration. Conjugacy classes of endomorphisms (the coend of hom, the
//! base of the shadow) are computed by closing `g f ~ f g` over all
//! opposite pairs with union-find.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groupring::{Group, GroupElement};

/// One morphism: endpoints and a display name.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    pub source: usize,
    pub target: usize,
    pub name: String,
}

/// Finite category with named objects and morphisms. All laws (identity,
/// composability, associativity) are verified at construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    /// compose[g][f] is `g` after `f`, present exactly when composable.
    compose: Vec<Vec<Option<usize>>>,
}

impl FinCategory {
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        composites: Vec<((usize, usize), usize)>,
    ) -> Result<Self> {
        let n = objects.len();
        let m = morphisms.len();
        if n == 0 && m > 0 {
            return Err(Error::NotACategory("morphisms need objects".into()));
        }
        for (i, mo) in morphisms.iter().enumerate() {
            if mo.source >= n || mo.target >= n {
                return Err(Error::NotACategory(format!(
                    "morphism {} has endpoints out of range",
                    i
                )));
            }
        }
        if identities.len() != n {
            return Err(Error::NotACategory("one identity per object required".into()));
        }
        let mut compose = vec![vec![None; m]; m];
        for ((g, f), gf) in composites {
            if g >= m || f >= m || gf >= m {
                return Err(Error::NotACategory("composite index out of range".into()));
            }
            if compose[g][f].is_some() {
                return Err(Error::NotACategory("duplicate composite entry".into()));
            }
            compose[g][f] = Some(gf);
        }
        let cat = FinCategory { objects, morphisms, identities, compose };
        // Identity endpoints and neutrality.
        for (a, &e) in cat.identities.iter().enumerate() {
            if e >= m || cat.morphisms[e].source != a || cat.morphisms[e].target != a {
                return Err(Error::NotACategory(format!(
                    "identity of object {} is not an endomorphism of it",
                    a
                )));
            }
        }
        // Composites exist exactly for composable pairs and have the right
        // endpoints.
        for g in 0..m {
            for f in 0..m {
                let composable = cat.morphisms[f].target == cat.morphisms[g].source;
                match cat.compose[g][f] {
                    Some(gf) => {
                        if !composable {
                            return Err(Error::NotACategory(format!(
                                "composite defined for non-composable pair ({}, {})",
                                g, f
                            )));
                        }
                        if cat.morphisms[gf].source != cat.morphisms[f].source
                            || cat.morphisms[gf].target != cat.morphisms[g].target
                        {
                            return Err(Error::NotACategory(format!(
                                "composite of ({}, {}) has wrong endpoints",
                                g, f
                            )));
                        }
                    }
                    None => {
                        if composable {
                            return Err(Error::NotACategory(format!(
                                "missing composite for pair ({}, {})",
                                g, f
                            )));
                        }
                    }
                }
            }
        }
        for f in 0..m {
            let (a, b) = (cat.morphisms[f].source, cat.morphisms[f].target);
            if cat.compose[f][cat.identities[a]] != Some(f)
                || cat.compose[cat.identities[b]][f] != Some(f)
            {
                return Err(Error::NotACategory(format!(
                    "identity is not neutral for morphism {}",
                    f
                )));
            }
        }
        // Associativity on all composable triples.
        for f in 0..m {
            for g in 0..m {
                if cat.morphisms[f].target != cat.morphisms[g].source {
                    continue;
                }
                let gf = cat.compose[g][f].unwrap();
                for h in 0..m {
                    if cat.morphisms[g].target != cat.morphisms[h].source {
                        continue;
                    }
                    let hg = cat.compose[h][g].unwrap();
                    if cat.compose[h][gf] != cat.compose[hg][f] {
                        return Err(Error::NotACategory(format!(
                            "associativity fails at ({}, {}, {})",
                            h, g, f
                        )));
                    }
                }
            }
        }
        Ok(cat)
    }

    /// One object, one identity.
    pub fn terminal() -> Self {
        FinCategory::new(
            vec!["*".into()],
            vec![Morphism { source: 0, target: 0, name: "id".into() }],
            vec![0],
            vec![((0, 0), 0)],
        )
        .expect("terminal category")
    }

    /// No objects at all. Every category law holds vacuously.
    pub fn empty() -> Self {
        FinCategory::new(Vec::new(), Vec::new(), Vec::new(), Vec::new())
            .expect("empty category")
    }

    /// `n` objects and only identities; `discrete(0)` is the empty category.
    pub fn discrete(n: usize) -> Result<Self> {
        let objects = (0..n).map(|i| format!("b{}", i)).collect();
        let morphisms = (0..n)
            .map(|i| Morphism { source: i, target: i, name: format!("id_b{}", i) })
            .collect();
        let composites = (0..n).map(|i| ((i, i), i)).collect();
        FinCategory::new(objects, morphisms, (0..n).collect(), composites)
    }

    /// Two objects and a single arrow between them.
    pub fn arrow() -> Self {
        FinCategory::new(
            vec!["a".into(), "b".into()],
            vec![
                Morphism { source: 0, target: 0, name: "id_a".into() },
                Morphism { source: 1, target: 1, name: "id_b".into() },
                Morphism { source: 0, target: 1, name: "alpha".into() },
            ],
            vec![0, 1],
            vec![((0, 0), 0), ((1, 1), 1), ((2, 0), 2), ((1, 2), 2)],
        )
        .expect("arrow category")
    }

    /// A finite group as a one-object category; morphism order follows
    /// `Group::elements`.
    pub fn from_group(group: &Group) -> Result<Self> {
        let elements = group.elements()?;
        let index: BTreeMap<&GroupElement, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let id = index[&group.identity()];
        let morphisms = elements
            .iter()
            .map(|g| Morphism { source: 0, target: 0, name: group.element_name(g) })
            .collect();
        let mut composites = Vec::new();
        for (gi, g) in elements.iter().enumerate() {
            for (fi, f) in elements.iter().enumerate() {
                composites.push(((gi, fi), index[&group.mul(g, f)]));
            }
        }
        FinCategory::new(vec!["*".into()], morphisms, vec![id], composites)
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_name(&self, a: usize) -> &str {
        &self.objects[a]
    }

    pub fn morphism(&self, f: usize) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn identity_of(&self, a: usize) -> usize {
        self.identities[a]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.morphisms[f].source] == f
    }

    /// `g` after `f`; an error when not composable.
    pub fn compose(&self, g: usize, f: usize) -> Result<usize> {
        self.compose[g][f].ok_or_else(|| {
            Error::NotACategory(format!("morphisms {} and {} are not composable", g, f))
        })
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&f| self.morphisms[f].source == a && self.morphisms[f].target == b)
            .collect()
    }

    pub fn endomorphisms(&self) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&f| self.morphisms[f].source == self.morphisms[f].target)
            .collect()
    }

    pub fn nonidentity_morphisms(&self) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&f| !self.is_identity(f)).collect()
    }

    /// True when nonidentity morphisms form a directed acyclic structure:
    /// every endomorphism is an identity and no two distinct objects have
    /// arrows both ways. Composition closure makes the pairwise check
    /// cover longer cycles. Loop-freeness bounds the length of composable
    /// strings of nonidentity morphisms, which keeps bar-style complexes
    /// finite.
    pub fn is_loop_free(&self) -> bool {
        for &e in &self.endomorphisms() {
            if !self.is_identity(e) {
                return false;
            }
        }
        for a in 0..self.n_objects() {
            for b in 0..a {
                let ab = self.hom(a, b);
                let ba = self.hom(b, a);
                if !ab.is_empty() && !ba.is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Conjugacy classes of endomorphisms: the quotient of the set of
    /// endomorphisms by the closure of `g f ~ f g` over all pairs
    /// `f: a -> b`, `g: b -> a`.
    pub fn conjugacy_classes(&self) -> ConjugacyClasses {
        let m = self.morphisms.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for f in 0..m {
            for g in 0..m {
                let fm = &self.morphisms[f];
                let gm = &self.morphisms[g];
                if fm.target == gm.source && gm.target == fm.source {
                    let gf = self.compose[g][f].unwrap();
                    let fg = self.compose[f][g].unwrap();
                    let (a, b) = (find(&mut parent, gf), find(&mut parent, fg));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &e in &self.endomorphisms() {
            grouped.entry(find(&mut parent, e)).or_default().push(e);
        }
        let classes: Vec<Vec<usize>> = grouped.into_values().collect();
        let mut class_of = BTreeMap::new();
        for (c, members) in classes.iter().enumerate() {
            for &e in members {
                class_of.insert(e, c);
            }
        }
        ConjugacyClasses { classes, class_of }
    }
}

/// Partition of the endomorphisms of a finite category.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConjugacyClasses {
    /// Each class lists its member endomorphism indices, ascending; the
    /// classes are ordered by least member.
    pub classes: Vec<Vec<usize>>,
    class_of: BTreeMap<usize, usize>,
}

impl ConjugacyClasses {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    /// Class index of an endomorphism; None for non-endomorphisms.
    pub fn class_of(&self, endo: usize) -> Option<usize> {
        self.class_of.get(&endo).copied()
    }

    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_category_validates() {
        let e = FinCategory::empty();
        assert_eq!(e.n_objects(), 0);
        assert!(e.is_loop_free());
        assert_eq!(e.conjugacy_classes().count(), 0);
        assert!(FinCategory::new(
            Vec::new(),
            vec![Morphism { source: 0, target: 0, name: "f".into() }],
            Vec::new(),
            Vec::new(),
        )
        .is_err());
    }

    #[test]
    fn terminal_and_arrow_validate() {
        let t = FinCategory::terminal();
        assert_eq!(t.n_morphisms(), 1);
        let a = FinCategory::arrow();
        assert_eq!(a.n_morphisms(), 3);
        assert!(a.is_loop_free());
        assert_eq!(a.compose(1, 2).unwrap(), 2);
        assert!(a.compose(2, 1).is_err());
    }

    #[test]
    fn missing_composite_is_rejected() {
        let r = FinCategory::new(
            vec!["a".into(), "b".into()],
            vec![
                Morphism { source: 0, target: 0, name: "id_a".into() },
                Morphism { source: 1, target: 1, name: "id_b".into() },
                Morphism { source: 0, target: 1, name: "alpha".into() },
            ],
            vec![0, 1],
            vec![((0, 0), 0), ((1, 1), 1), ((2, 0), 2)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn wrong_identity_is_rejected() {
        let r = FinCategory::new(
            vec!["a".into()],
            vec![Morphism { source: 0, target: 0, name: "id".into() }],
            vec![5],
            vec![((0, 0), 0)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // Two parallel endomorphisms with a non-associative "composition".
        let r = FinCategory::new(
            vec!["a".into()],
            vec![
                Morphism { source: 0, target: 0, name: "id".into() },
                Morphism { source: 0, target: 0, name: "s".into() },
            ],
            vec![0],
            vec![((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 0)],
        );
        // s s == id, associativity holds here (this is C2); build a truly
        // broken one by making s s == s while keeping identity laws.
        assert!(r.is_ok());
        let broken = FinCategory::new(
            vec!["a".into()],
            vec![
                Morphism { source: 0, target: 0, name: "id".into() },
                Morphism { source: 0, target: 0, name: "s".into() },
                Morphism { source: 0, target: 0, name: "t".into() },
            ],
            vec![0],
            vec![
                ((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((0, 2), 2), ((2, 0), 2),
                ((1, 1), 2), ((1, 2), 0), ((2, 1), 1), ((2, 2), 1),
            ],
        );
        assert!(broken.is_err());
    }

    #[test]
    fn group_category_conjugacy_matches_group_theory() {
        let s3 = Group::symmetric(3).unwrap();
        let cat = FinCategory::from_group(&s3).unwrap();
        assert!(!cat.is_loop_free());
        let classes = cat.conjugacy_classes();
        // Three conjugacy classes: identity, transpositions, three-cycles.
        assert_eq!(classes.count(), 3);
        let sizes: Vec<usize> = classes.classes.iter().map(|c| c.len()).collect();
        let mut sorted = sizes.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3]);
    }

    #[test]
    fn abelian_group_category_has_singleton_classes() {
        let c4 = Group::cyclic(4).unwrap();
        let cat = FinCategory::from_group(&c4).unwrap();
        assert_eq!(cat.conjugacy_classes().count(), 4);
    }

    #[test]
    fn arrow_category_classes_are_the_identities() {
        let a = FinCategory::arrow();
        let classes = a.conjugacy_classes();
        assert_eq!(classes.count(), 2);
        assert_eq!(classes.class_of(2), None);
    }

    #[test]
    fn discrete_is_loop_free_groups_are_not() {
        assert!(FinCategory::discrete(3).unwrap().is_loop_free());
        let c2 = Group::cyclic(2).unwrap();
        assert!(!FinCategory::from_group(&c2).unwrap().is_loop_free());
        let c1 = Group::cyclic(1).unwrap();
        assert!(FinCategory::from_group(&c1).unwrap().is_loop_free());
    }
}
