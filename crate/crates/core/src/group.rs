//! Finite abelian groups `Z/n_1 × … × Z/n_k`, their subgroups and characters,
//! and idempotents of group algebras.
//!
//! Elements are identified with their index in the lexicographic enumeration of
//! residue tuples, so `GroupElement(0)` is always the identity and comparing indices
//! compares residue tuples lexicographically.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("subgroup is not contained in the character's domain")]
    NotASubgroup,
    #[error("residue tuple {0:?} does not belong to the group")]
    BadElement(Vec<i64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupElement(pub u32);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// `Z/n_1 × … × Z/n_k` with precomputed multiplication and inverse tables.
#[derive(Debug)]
pub struct AbelianGroup {
    factors: Vec<u32>,
    residues: Vec<Vec<u32>>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    exponent: u32,
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for AbelianGroup {}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl AbelianGroup {
    pub fn new(factors: Vec<u32>) -> Arc<Self> {
        assert!(factors.iter().all(|&n| n >= 1), "cyclic factors must be positive");
        let order: usize = factors.iter().map(|&n| n as usize).product();
        let mut residues = Vec::with_capacity(order);
        for idx in 0..order {
            let mut r = vec![0u32; factors.len()];
            let mut rest = idx;
            for (k, &n) in factors.iter().enumerate().rev() {
                r[k] = (rest % n as usize) as u32;
                rest /= n as usize;
            }
            residues.push(r);
        }
        let encode = |r: &[u32]| -> u32 {
            let mut idx = 0usize;
            for (k, &n) in factors.iter().enumerate() {
                idx = idx * n as usize + r[k] as usize;
            }
            idx as u32
        };
        let mut mul = vec![0u32; order * order];
        let mut inv = vec![0u32; order];
        for a in 0..order {
            for b in 0..order {
                let r: Vec<u32> = residues[a]
                    .iter()
                    .zip(&residues[b])
                    .zip(&factors)
                    .map(|((x, y), n)| (x + y) % n)
                    .collect();
                mul[a * order + b] = encode(&r);
            }
            let r: Vec<u32> = residues[a].iter().zip(&factors).map(|(x, n)| (n - x) % n).collect();
            inv[a] = encode(&r);
        }
        let exponent = factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64)) as u32;
        Arc::new(AbelianGroup { factors, residues, mul, inv, exponent })
    }

    pub fn trivial() -> Arc<Self> {
        Self::new(vec![])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.residues.len()
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order() as u32).map(GroupElement)
    }

    pub fn residues(&self, g: GroupElement) -> &[u32] {
        &self.residues[g.index()]
    }

    pub fn element(&self, residues: &[i64]) -> Result<GroupElement, GroupError> {
        if residues.len() != self.factors.len() {
            return Err(GroupError::BadElement(residues.to_vec()));
        }
        let mut idx = 0usize;
        for (k, &n) in self.factors.iter().enumerate() {
            idx = idx * n as usize + residues[k].rem_euclid(n as i64) as usize;
        }
        Ok(GroupElement(idx as u32))
    }

    /// The `k`-th standard generator (residue 1 in factor `k`).
    pub fn generator(&self, k: usize) -> GroupElement {
        let mut r = vec![0i64; self.factors.len()];
        r[k] = 1;
        self.element(&r).expect("generator index in range")
    }

    pub fn op(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(self.mul[a.index() * self.order() + b.index()])
    }

    pub fn inverse(&self, a: GroupElement) -> GroupElement {
        GroupElement(self.inv[a.index()])
    }

    pub fn pow(&self, a: GroupElement, k: i64) -> GroupElement {
        let r: Vec<i64> = self.residues(a).iter().map(|&x| x as i64 * k).collect();
        self.element(&r).expect("same arity")
    }

    pub fn element_order(&self, a: GroupElement) -> u32 {
        let mut k = 1;
        let mut x = a;
        while x != GroupElement::IDENTITY {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    pub fn format(&self, g: GroupElement) -> String {
        let r: Vec<String> = self.residues(g).iter().map(u32::to_string).collect();
        format!("({})", r.join(","))
    }
}

/// A subgroup stored by full enumeration, together with an explicit cyclic
/// decomposition `H = <y_1> ⊕ … ⊕ <y_r>` obtained from the Smith normal form of
/// the relation lattice of its generators.
#[derive(Debug)]
pub struct Subgroup {
    parent: Arc<AbelianGroup>,
    elements: Vec<GroupElement>,
    generators: Vec<GroupElement>,
    cyclic_generators: Vec<GroupElement>,
    cyclic_orders: Vec<u32>,
    coordinates: HashMap<GroupElement, Vec<u32>>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        *self.parent == *other.parent && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// The smallest subgroup containing `gens`.
    pub fn generated(parent: &Arc<AbelianGroup>, gens: &[GroupElement]) -> Arc<Subgroup> {
        let mut member = vec![false; parent.order()];
        member[0] = true;
        let mut elements = vec![GroupElement::IDENTITY];
        let mut frontier = vec![GroupElement::IDENTITY];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = parent.op(x, g);
                if !member[y.index()] {
                    member[y.index()] = true;
                    elements.push(y);
                    frontier.push(y);
                }
            }
        }
        elements.sort();
        Self::from_elements(parent, elements)
    }

    pub fn whole(parent: &Arc<AbelianGroup>) -> Arc<Subgroup> {
        Self::from_elements(parent, parent.elements().collect())
    }

    pub fn trivial(parent: &Arc<AbelianGroup>) -> Arc<Subgroup> {
        Self::from_elements(parent, vec![GroupElement::IDENTITY])
    }

    /// Builds a subgroup from a sorted, closed element list.
    pub fn from_elements(parent: &Arc<AbelianGroup>, elements: Vec<GroupElement>) -> Arc<Subgroup> {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        // greedy minimal generating list in lexicographic order
        let mut generators = Vec::new();
        let mut span = vec![GroupElement::IDENTITY];
        for &e in &elements {
            if span.binary_search(&e).is_err() {
                generators.push(e);
                span = closure(parent, &generators);
            }
        }
        let (cyclic_generators, cyclic_orders) = cyclic_decomposition(parent, &generators);
        let mut coordinates = HashMap::new();
        let total: usize = cyclic_orders.iter().map(|&d| d as usize).product();
        assert_eq!(total, elements.len(), "cyclic decomposition has the wrong order");
        for idx in 0..total {
            let mut rest = idx;
            let mut coord = vec![0u32; cyclic_orders.len()];
            for (k, &d) in cyclic_orders.iter().enumerate().rev() {
                coord[k] = (rest % d as usize) as u32;
                rest /= d as usize;
            }
            let mut x = GroupElement::IDENTITY;
            for (k, &c) in coord.iter().enumerate() {
                x = parent.op(x, parent.pow(cyclic_generators[k], c as i64));
            }
            coordinates.insert(x, coord);
        }
        assert_eq!(coordinates.len(), elements.len(), "cyclic generators are dependent");
        Arc::new(Subgroup {
            parent: parent.clone(),
            elements,
            generators,
            cyclic_generators,
            cyclic_orders,
            coordinates,
        })
    }

    pub fn parent(&self) -> &Arc<AbelianGroup> {
        &self.parent
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn cyclic_orders(&self) -> &[u32] {
        &self.cyclic_orders
    }

    pub fn cyclic_generators(&self) -> &[GroupElement] {
        &self.cyclic_generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    pub fn intersection(&self, other: &Subgroup) -> Arc<Subgroup> {
        let elements = self.elements.iter().copied().filter(|&g| other.contains(g)).collect();
        Self::from_elements(&self.parent, elements)
    }

    fn position(&self, g: GroupElement) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }
}

fn closure(parent: &AbelianGroup, gens: &[GroupElement]) -> Vec<GroupElement> {
    let mut member = vec![false; parent.order()];
    member[0] = true;
    let mut frontier = vec![GroupElement::IDENTITY];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = parent.op(x, g);
            if !member[y.index()] {
                member[y.index()] = true;
                frontier.push(y);
            }
        }
    }
    (0..parent.order() as u32).filter(|&i| member[i as usize]).map(GroupElement).collect()
}

/// Splits `<gens>` into cyclic factors of order > 1.
fn cyclic_decomposition(
    parent: &AbelianGroup,
    gens: &[GroupElement],
) -> (Vec<GroupElement>, Vec<u32>) {
    let m = gens.len();
    if m == 0 {
        return (vec![], vec![]);
    }
    // Every relation reduces into the box prod [0, ord(h_j)), so the order relations
    // together with the collisions inside the box generate the relation lattice.
    let orders: Vec<u32> = gens.iter().map(|&g| parent.element_order(g)).collect();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (j, &o) in orders.iter().enumerate() {
        let mut r = vec![0i64; m];
        r[j] = o as i64;
        rows.push(r);
    }
    let mut seen: HashMap<GroupElement, Vec<i64>> = HashMap::new();
    let total: usize = orders.iter().map(|&o| o as usize).product();
    for idx in 0..total {
        let mut rest = idx;
        let mut c = vec![0i64; m];
        for (j, &o) in orders.iter().enumerate().rev() {
            c[j] = (rest % o as usize) as i64;
            rest /= o as usize;
        }
        let mut x = GroupElement::IDENTITY;
        for (j, &cj) in c.iter().enumerate() {
            x = parent.op(x, parent.pow(gens[j], cj));
        }
        match seen.get(&x) {
            Some(first) => rows.push(c.iter().zip(first).map(|(a, b)| a - b).collect()),
            None => {
                seen.insert(x, c);
            }
        }
    }
    let snf = crate::smith::smith_normal_form(&rows, m);
    let mut cyc_gens = Vec::new();
    let mut cyc_orders = Vec::new();
    for (i, &d) in snf.diagonal.iter().enumerate() {
        let d = d.unsigned_abs() as u32;
        assert!(d != 0, "finite group has a free relation-lattice quotient");
        if d == 1 {
            continue;
        }
        let mut y = GroupElement::IDENTITY;
        for (j, &c) in snf.col_inverse[i].iter().enumerate() {
            y = parent.op(y, parent.pow(gens[j], c));
        }
        cyc_gens.push(y);
        cyc_orders.push(d);
    }
    (cyc_gens, cyc_orders)
}

/// A character `H → μ_N`, `N` the exponent of the parent group; value `k` stands
/// for `ζ_N^k`.
#[derive(Clone, Debug)]
pub struct Character {
    domain: Arc<Subgroup>,
    label: Vec<u32>,
    values: Vec<u32>,
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        *self.domain == *other.domain && self.values == other.values
    }
}

impl Eq for Character {}

impl Character {
    pub fn domain(&self) -> &Arc<Subgroup> {
        &self.domain
    }

    /// Exponent tuple `m` with `χ(y_i) = ζ_{d_i}^{m_i}` on the cyclic generators.
    pub fn label(&self) -> &[u32] {
        &self.label
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn modulus(&self) -> u32 {
        self.domain.parent.exponent()
    }

    /// The exponent `k` with `χ(g) = ζ_N^k`; `None` outside the domain.
    pub fn exponent_at(&self, g: GroupElement) -> Option<u32> {
        self.domain.position(g).map(|p| self.values[p])
    }

    pub fn value(&self, g: GroupElement) -> Option<Scalar> {
        self.exponent_at(g).map(|k| Scalar::root_of_unity(self.modulus(), k as i64))
    }

    /// Panicking variant of [`Character::value`] for elements known to lie in the domain.
    pub fn at(&self, g: GroupElement) -> Scalar {
        self.value(g).unwrap_or_else(|| {
            panic!("{} is outside the character's domain", self.domain.parent.format(g))
        })
    }

    pub fn restrict(&self, to: &Arc<Subgroup>) -> Result<Character, GroupError> {
        if !to.is_subgroup_of(&self.domain) {
            return Err(GroupError::NotASubgroup);
        }
        let values: Vec<u32> =
            to.elements.iter().map(|&g| self.exponent_at(g).expect("contained")).collect();
        Ok(Character::from_values(to, values))
    }

    /// Pointwise product; both characters must share a domain.
    pub fn product(&self, other: &Character) -> Character {
        assert!(*self.domain == *other.domain, "characters on different subgroups");
        let n = self.modulus();
        let values = self.values.iter().zip(&other.values).map(|(a, b)| (a + b) % n).collect();
        Character::from_values(&self.domain, values)
    }

    pub fn inverse(&self) -> Character {
        let n = self.modulus();
        let values = self.values.iter().map(|a| (n - a) % n).collect();
        Character::from_values(&self.domain, values)
    }

    /// The character with `χ(g) = ζ_N^{f(g)}`, or `None` when `f` is not a homomorphism.
    pub fn from_fn(domain: &Arc<Subgroup>, f: impl Fn(GroupElement) -> u32) -> Option<Character> {
        let n = domain.parent.exponent();
        let values: Vec<u32> = domain.elements.iter().map(|&g| f(g) % n).collect();
        for (x, &g) in domain.elements.iter().enumerate() {
            for (y, &h) in domain.elements.iter().enumerate() {
                let gh = domain.position(domain.parent.op(g, h)).expect("closed");
                if (values[x] + values[y]) % n != values[gh] {
                    return None;
                }
            }
        }
        Some(Character::from_values(domain, values))
    }

    fn from_values(domain: &Arc<Subgroup>, values: Vec<u32>) -> Character {
        let n = domain.parent.exponent();
        let label = domain
            .cyclic_generators
            .iter()
            .zip(&domain.cyclic_orders)
            .map(|(&y, &d)| {
                let p = domain.position(y).expect("cyclic generator in subgroup");
                values[p] / (n / d)
            })
            .collect();
        Character { domain: domain.clone(), label, values }
    }

    /// Short human-readable label: `tr` for the trivial character, else the exponent tuple.
    pub fn name(&self) -> String {
        if self.is_trivial() {
            "tr".to_string()
        } else {
            let parts: Vec<String> = self.label.iter().map(u32::to_string).collect();
            format!("({})", parts.join(","))
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// All characters of `h`, ordered lexicographically by exponent tuple.
pub fn characters_of(h: &Arc<Subgroup>) -> Vec<Character> {
    let n = h.parent.exponent();
    let orders = &h.cyclic_orders;
    let total: usize = orders.iter().map(|&d| d as usize).product();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut m = vec![0u32; orders.len()];
        for (k, &d) in orders.iter().enumerate().rev() {
            m[k] = (rest % d as usize) as u32;
            rest /= d as usize;
        }
        let values = h
            .elements
            .iter()
            .map(|g| {
                let coord = &h.coordinates[g];
                coord
                    .iter()
                    .zip(&m)
                    .zip(orders)
                    .map(|((&e, &mi), &d)| (e as u64 * mi as u64 * (n / d) as u64) % n as u64)
                    .sum::<u64>() as u32
                    % n
            })
            .collect();
        out.push(Character { domain: h.clone(), label: m, values });
    }
    out
}

/// An element of the group algebra `kG`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    group: Arc<AbelianGroup>,
    terms: BTreeMap<GroupElement, Scalar>,
}

impl GroupAlgebraElement {
    pub fn zero(group: &Arc<AbelianGroup>) -> Self {
        GroupAlgebraElement { group: group.clone(), terms: BTreeMap::new() }
    }

    pub fn basis(group: &Arc<AbelianGroup>, g: GroupElement) -> Self {
        let mut e = Self::zero(group);
        e.add_term(g, Scalar::one());
        e
    }

    pub fn one(group: &Arc<AbelianGroup>) -> Self {
        Self::basis(group, GroupElement::IDENTITY)
    }

    pub fn terms(&self) -> &BTreeMap<GroupElement, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, g: GroupElement, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(g).or_insert_with(Scalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&g, c) in &other.terms {
            out.add_term(g, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(&self.group);
        for (&g, x) in &self.terms {
            out.add_term(g, x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.group);
        for (&g, x) in &self.terms {
            for (&h, y) in &other.terms {
                out.add_term(self.group.op(g, h), x * y);
            }
        }
        out
    }
}

/// `e_ρ = (1/|H|) Σ_{h ∈ H} ρ(h) h` for `ρ` a character of `H`.
pub fn idempotent(rho: &Character) -> GroupAlgebraElement {
    let h = rho.domain();
    let mut out = GroupAlgebraElement::zero(h.parent());
    let scale = Scalar::from_ratio(1, h.order() as i64);
    for &g in h.elements() {
        out.add_term(g, &rho.at(g) * &scale);
    }
    out
}
