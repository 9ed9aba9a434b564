//! Quasi-split Satake diagrams of ADE type and the coweight data attached to them.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::scalar::Gauss;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatakeError {
    #[error("not a Cartan matrix of type ADE: {0}")]
    NotADE(String),
    #[error("tau is not an involution")]
    TauNotInvolution,
    #[error("tau does not preserve the Cartan matrix (c[{0}][{1}] != c[tau {0}][tau {1}])")]
    TauNotAutomorphism(usize, usize),
    #[error("input has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lambda is not dominant at node {0}")]
    NotDominant(usize),
    #[error("lambda - mu is not in the coroot lattice")]
    NotInCorootLattice,
    #[error("negative multiplicity v[{0}] = {1}")]
    NegativeMultiplicity(usize, i64),
    #[error("multiplicities are not tau-invariant at node {0}")]
    MultiplicityNotInvariant(usize),
    #[error("theta is nonzero at node {0}, which is not fixed by tau")]
    ThetaOutsideFixedSet(usize),
    #[error("theta is nonzero at adjacent nodes {0} and {1}")]
    AdjacentThetas(usize, usize),
    #[error("theta must be 0 or 1 (node {0})")]
    ThetaRange(usize),
    #[error("orientation is incompatible with tau at edge {0}->{1}")]
    IncompatibleOrientation(usize, usize),
    #[error("orientation does not orient edge {0}-{1} exactly once")]
    OrientationIncomplete(usize, usize),
}

/// Simply-laced Cartan matrix with a diagram involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatakeDiagram {
    cartan: Vec<Vec<i32>>,
    tau: Vec<usize>,
}

/// Cartan type letters supported by [`cartan_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CartanType {
    A,
    D,
    E,
}

/// The Cartan matrix of `A_n`, `D_n` (n ≥ 4) or `E_n` (n = 6, 7, 8), with the
/// Bourbaki numbering.
pub fn cartan_matrix(kind: CartanType, n: usize) -> Option<Vec<Vec<i32>>> {
    let edges: Vec<(usize, usize)> = match kind {
        CartanType::A if n >= 1 => (1..n).map(|k| (k - 1, k)).collect(),
        CartanType::D if n >= 4 => {
            let mut e: Vec<_> = (1..n - 1).map(|k| (k - 1, k)).collect();
            e.push((n - 3, n - 1));
            e
        }
        CartanType::E if (6..=8).contains(&n) => {
            let mut e = vec![(0, 2), (1, 3), (2, 3)];
            e.extend((4..n).map(|k| (k - 1, k)));
            e
        }
        _ => return None,
    };
    let mut c = vec![vec![0; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        c[a][b] = -1;
        c[b][a] = -1;
    }
    Some(c)
}

fn check_ade(c: &[Vec<i32>]) -> Result<(), SatakeError> {
    let n = c.len();
    if n == 0 {
        return Err(SatakeError::NotADE("empty matrix".into()));
    }
    for (i, row) in c.iter().enumerate() {
        if row.len() != n {
            return Err(SatakeError::NotADE("matrix is not square".into()));
        }
        if row[i] != 2 {
            return Err(SatakeError::NotADE(format!(
                "diagonal entry {} is not 2",
                i + 1
            )));
        }
        for (j, &x) in row.iter().enumerate() {
            if i != j && x != 0 && x != -1 {
                return Err(SatakeError::NotADE(format!(
                    "entry ({},{}) = {}",
                    i + 1,
                    j + 1,
                    x
                )));
            }
            if c[j][i] != x {
                return Err(SatakeError::NotADE("matrix is not symmetric".into()));
            }
        }
    }
    let adj = |i: usize| (0..n).filter(move |&j| j != i && c[i][j] == -1);
    let edge_count: usize = (0..n).map(|i| adj(i).count()).sum::<usize>() / 2;
    // connected
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in adj(i) {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(SatakeError::NotADE("diagram is disconnected".into()));
    }
    if edge_count != n - 1 {
        return Err(SatakeError::NotADE("diagram has a cycle".into()));
    }
    let branches: Vec<usize> = (0..n).filter(|&i| adj(i).count() >= 3).collect();
    match branches.as_slice() {
        [] => Ok(()),
        [b] => {
            if adj(*b).count() > 3 {
                return Err(SatakeError::NotADE("node of degree > 3".into()));
            }
            // arm lengths counted including the branch node
            let arms: Vec<usize> = adj(*b)
                .map(|start| {
                    let (mut prev, mut cur, mut len) = (*b, start, 2);
                    loop {
                        let next: Vec<usize> = adj(cur).filter(|&x| x != prev).collect();
                        match next.as_slice() {
                            [] => return len,
                            [x] => {
                                prev = cur;
                                cur = *x;
                                len += 1;
                            }
                            _ => unreachable!("single branch node"),
                        }
                    }
                })
                .collect();
            // 1/p + 1/q + 1/r > 1
            let (p, q, r) = (arms[0], arms[1], arms[2]);
            if q * r + p * r + p * q > p * q * r {
                Ok(())
            } else {
                Err(SatakeError::NotADE("affine or hyperbolic tree".into()))
            }
        }
        _ => Err(SatakeError::NotADE("more than one branch node".into())),
    }
}

impl SatakeDiagram {
    /// Validates a Cartan matrix and an involution given as a 0-based permutation.
    pub fn new(cartan: Vec<Vec<i32>>, tau: Vec<usize>) -> Result<Self, SatakeError> {
        check_ade(&cartan)?;
        let n = cartan.len();
        if tau.len() != n {
            return Err(SatakeError::DimensionMismatch {
                expected: n,
                got: tau.len(),
            });
        }
        let distinct: BTreeSet<usize> = tau.iter().copied().collect();
        if distinct.len() != n || tau.iter().any(|&t| t >= n) {
            return Err(SatakeError::TauNotInvolution);
        }
        if (0..n).any(|i| tau[tau[i]] != i) {
            return Err(SatakeError::TauNotInvolution);
        }
        for i in 0..n {
            for j in 0..n {
                if cartan[i][j] != cartan[tau[i]][tau[j]] {
                    return Err(SatakeError::TauNotAutomorphism(i + 1, j + 1));
                }
            }
        }
        Ok(SatakeDiagram { cartan, tau })
    }

    /// A split diagram (τ = id).
    pub fn split(cartan: Vec<Vec<i32>>) -> Result<Self, SatakeError> {
        let n = cartan.len();
        SatakeDiagram::new(cartan, (0..n).collect())
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn c(&self, i: usize, j: usize) -> i32 {
        self.cartan[i][j]
    }

    pub fn cartan(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    pub fn tau(&self, i: usize) -> usize {
        self.tau[i]
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.tau[i] == i
    }

    pub fn is_split(&self) -> bool {
        (0..self.rank()).all(|i| self.is_fixed(i))
    }

    /// Fixed points of τ.
    pub fn i0(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.is_fixed(i)).collect()
    }

    /// Smallest index of every 2-orbit.
    pub fn i1(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.tau[i] > i).collect()
    }

    pub fn i_minus1(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.tau[i] < i).collect()
    }

    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank()).filter(move |&j| j != i && self.cartan[i][j] == -1)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.cartan[a][b] == -1)
            .collect()
    }
}

/// An orientation of every Dynkin edge, stored as the set of arrows `a -> b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    arrows: BTreeSet<(usize, usize)>,
}

impl Orientation {
    /// Orients each edge from the smaller to the larger index, then flips edges whose
    /// τ-image forces the opposite direction.
    pub fn default_for(d: &SatakeDiagram) -> Self {
        let mut arrows = BTreeSet::new();
        let mut done = BTreeSet::new();
        for (a, b) in d.edges() {
            if done.contains(&(a, b)) {
                continue;
            }
            arrows.insert((a, b));
            done.insert((a, b));
            // forced partner: if a is not fixed, τb -> τa; if b is not fixed,
            // the partner edge τb -> τa likewise follows from the rule at τb.
            let (ta, tb) = (d.tau(a), d.tau(b));
            let partner = (ta.min(tb), ta.max(tb));
            if !done.contains(&partner) {
                arrows.insert((tb, ta));
                done.insert(partner);
            }
        }
        Orientation { arrows }
    }

    /// Builds an orientation from explicit arrows and checks it against the diagram.
    pub fn from_arrows(
        d: &SatakeDiagram,
        arrows: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, SatakeError> {
        let o = Orientation {
            arrows: arrows.into_iter().collect(),
        };
        o.check(d)?;
        Ok(o)
    }

    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arrows.iter().copied()
    }

    pub fn points(&self, a: usize, b: usize) -> bool {
        self.arrows.contains(&(a, b))
    }

    /// Every edge oriented once, no arrows off the diagram, and the τ rule
    /// "i -> j implies τj -> τi" for every non-fixed source i.
    pub fn check(&self, d: &SatakeDiagram) -> Result<(), SatakeError> {
        for &(a, b) in &self.arrows {
            if a >= d.rank() || b >= d.rank() || d.c(a, b) != -1 {
                return Err(SatakeError::OrientationIncomplete(a + 1, b + 1));
            }
        }
        for (a, b) in d.edges() {
            if self.points(a, b) == self.points(b, a) {
                return Err(SatakeError::OrientationIncomplete(a + 1, b + 1));
            }
        }
        for &(i, j) in &self.arrows {
            if !d.is_fixed(i) && !self.points(d.tau(j), d.tau(i)) {
                return Err(SatakeError::IncompatibleOrientation(i + 1, j + 1));
            }
        }
        Ok(())
    }
}

/// Twice ℘_i: +1 if τi -> i, -1 if i -> τi, 0 otherwise.
pub fn assign_wp(d: &SatakeDiagram, o: &Orientation) -> Result<Vec<i32>, SatakeError> {
    o.check(d)?;
    Ok((0..d.rank())
        .map(|i| {
            let t = d.tau(i);
            if o.points(t, i) {
                1
            } else if o.points(i, t) {
                -1
            } else {
                0
            }
        })
        .collect())
}

/// Solves `C v = w - ell` over the integers with `v ≥ 0`.
pub fn solve_shift(d: &SatakeDiagram, w: &[i64], ell: &[i64]) -> Result<Vec<u32>, SatakeError> {
    let n = d.rank();
    for len in [w.len(), ell.len()] {
        if len != n {
            return Err(SatakeError::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    if let Some(i) = w.iter().position(|&x| x < 0) {
        return Err(SatakeError::NotDominant(i + 1));
    }
    let rhs: Vec<i64> = w.iter().zip(ell).map(|(a, b)| a - b).collect();
    let v = solve_integer(d.cartan(), &rhs).ok_or(SatakeError::NotInCorootLattice)?;
    if let Some(i) = v.iter().position(|&x| x < 0) {
        return Err(SatakeError::NegativeMultiplicity(i + 1, v[i]));
    }
    Ok(v.into_iter().map(|x| x as u32).collect())
}

/// Fraction-free Gaussian elimination; `None` if the unique rational solution is
/// not integral.
fn solve_integer(c: &[Vec<i32>], rhs: &[i64]) -> Option<Vec<i64>> {
    use num_rational::Rational64;
    let n = c.len();
    let mut m: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational64> = c[i]
                .iter()
                .map(|&x| Rational64::from_integer(x as i64))
                .collect();
            row.push(Rational64::from_integer(rhs[i]));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != Rational64::from_integer(0))?;
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != Rational64::from_integer(0) {
                    let pivot_row = m[col].clone();
                    for (x, y) in m[r].iter_mut().zip(pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    m.iter()
        .map(|row| row[n].is_integer().then(|| row[n].to_integer()))
        .collect()
}

/// Enforces θ_i ∈ {0,1}, θ_i = 0 off the fixed set, and c_ij θ_i θ_j = 0 for i ≠ j.
pub fn validate_theta(d: &SatakeDiagram, theta: &[u8]) -> Result<(), SatakeError> {
    if theta.len() != d.rank() {
        return Err(SatakeError::DimensionMismatch {
            expected: d.rank(),
            got: theta.len(),
        });
    }
    for (i, &t) in theta.iter().enumerate() {
        if t > 1 {
            return Err(SatakeError::ThetaRange(i + 1));
        }
        if t == 1 && !d.is_fixed(i) {
            return Err(SatakeError::ThetaOutsideFixedSet(i + 1));
        }
    }
    for (a, b) in d.edges() {
        if theta[a] == 1 && theta[b] == 1 {
            return Err(SatakeError::AdjacentThetas(a + 1, b + 1));
        }
    }
    Ok(())
}

/// How the central parameters ζ_i enter the images.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ZetaMode {
    #[default]
    Symbolic,
    Numeric(Vec<Gauss>),
}

/// A validated instance: diagram, coweight pairings, multiplicities, θ, orientation, ℘.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftInstance {
    pub name: String,
    pub diagram: SatakeDiagram,
    /// ⟨λ, α_i⟩
    pub w: Vec<i64>,
    /// ⟨μ, α_i⟩
    pub ell: Vec<i64>,
    pub v: Vec<u32>,
    pub theta: Vec<u8>,
    pub orientation: Orientation,
    /// 2℘_i ∈ {-1, 0, 1}
    pub wp2: Vec<i32>,
    pub zeta: ZetaMode,
}

impl ShiftInstance {
    pub fn new(
        name: impl Into<String>,
        diagram: SatakeDiagram,
        w: Vec<i64>,
        ell: Vec<i64>,
        theta: Vec<u8>,
        orientation: Option<Orientation>,
    ) -> Result<Self, SatakeError> {
        let v = solve_shift(&diagram, &w, &ell)?;
        // The block structure pairs w_{i,r} with w_{τi,r}, so 𝐯 must be τ-invariant.
        if let Some(i) = (0..diagram.rank()).find(|&i| v[i] != v[diagram.tau(i)]) {
            return Err(SatakeError::MultiplicityNotInvariant(i + 1));
        }
        validate_theta(&diagram, &theta)?;
        let orientation = orientation.unwrap_or_else(|| Orientation::default_for(&diagram));
        let wp2 = assign_wp(&diagram, &orientation)?;
        Ok(ShiftInstance {
            name: name.into(),
            diagram,
            w,
            ell,
            v,
            theta,
            orientation,
            wp2,
            zeta: ZetaMode::Symbolic,
        })
    }

    pub fn rank(&self) -> usize {
        self.diagram.rank()
    }

    pub fn tau(&self, i: usize) -> usize {
        self.diagram.tau(i)
    }

    pub fn c(&self, i: usize, j: usize) -> i32 {
        self.diagram.c(i, j)
    }

    /// A copy with overwritten multiplicities, skipping the shift equation. Used to
    /// build deliberately inconsistent instances.
    pub fn with_multiplicities_unchecked(&self, v: Vec<u32>) -> Self {
        ShiftInstance { v, ..self.clone() }
    }

    /// 𝐰_i − Σ_j c_ij 𝐯_j, which equals ℓ_i on a consistent instance.
    pub fn recomputed_ell(&self) -> Vec<i64> {
        (0..self.rank())
            .map(|i| {
                self.w[i]
                    - (0..self.rank())
                        .map(|j| self.c(i, j) as i64 * self.v[j] as i64)
                        .sum::<i64>()
            })
            .collect()
    }
}

impl fmt::Display for ShiftInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {}", self.name)?;
        writeln!(f, "  rank   {}", self.rank())?;
        writeln!(
            f,
            "  tau    {}",
            (0..self.rank()).map(|i| self.tau(i) + 1).join(",")
        )?;
        writeln!(f, "  w      {}", self.w.iter().join(","))?;
        writeln!(f, "  ell    {}", self.ell.iter().join(","))?;
        writeln!(f, "  v      {}", self.v.iter().join(","))?;
        writeln!(f, "  theta  {}", self.theta.iter().join(","))?;
        writeln!(
            f,
            "  orient {}",
            self.orientation
                .arrows()
                .map(|(a, b)| format!("{}>{}", a + 1, b + 1))
                .join(",")
        )?;
        write!(
            f,
            "  wp     {}",
            self.wp2
                .iter()
                .map(|&x| match x {
                    0 => "0".to_string(),
                    s => format!("{}1/2", if s > 0 { "+" } else { "-" }),
                })
                .join(",")
        )
    }
}

fn type_a(n: usize, tau: Vec<usize>) -> SatakeDiagram {
    SatakeDiagram::new(cartan_matrix(CartanType::A, n).unwrap(), tau).expect("catalog diagram")
}

/// The built-in instances used by the acceptance run.
pub fn build_catalog() -> Vec<ShiftInstance> {
    let mk = |name: &str, d: SatakeDiagram, w: Vec<i64>, ell: Vec<i64>, theta: Vec<u8>| {
        ShiftInstance::new(name, d, w, ell, theta, None).expect("catalog instance")
    };
    let a1 = || type_a(1, vec![0]);
    let a2 = || type_a(2, vec![0, 1]);
    let qa2 = || type_a(2, vec![1, 0]);
    let qa3 = || type_a(3, vec![2, 1, 0]);
    let qa4 = || type_a(4, vec![3, 2, 1, 0]);
    vec![
        mk("splitA1-v1-t0", a1(), vec![2], vec![0], vec![0]),
        mk("splitA1-v1-t1", a1(), vec![2], vec![0], vec![1]),
        mk("splitA1-v2-t0", a1(), vec![2], vec![-2], vec![0]),
        mk("splitA1-v2-t1", a1(), vec![2], vec![-2], vec![1]),
        mk("splitA2-v11-t00", a2(), vec![1, 1], vec![0, 0], vec![0, 0]),
        mk("splitA2-v11-t10", a2(), vec![1, 1], vec![0, 0], vec![1, 0]),
        mk(
            "qsA3-v111-t0",
            qa3(),
            vec![1, 0, 1],
            vec![0, 0, 0],
            vec![0, 0, 0],
        ),
        mk(
            "qsA3-v111-t1",
            qa3(),
            vec![1, 0, 1],
            vec![0, 0, 0],
            vec![0, 1, 0],
        ),
        mk("qsA2-v11", qa2(), vec![1, 1], vec![0, 0], vec![0, 0]),
        mk(
            "qsA4-v1111",
            qa4(),
            vec![1, 0, 0, 1],
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 0],
        ),
    ]
}

pub fn catalog_instance(name: &str) -> Option<ShiftInstance> {
    build_catalog().into_iter().find(|x| x.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: usize) -> Vec<Vec<i32>> {
        cartan_matrix(CartanType::A, n).unwrap()
    }

    #[test]
    fn orbit_partition() {
        let d = SatakeDiagram::new(a(3), vec![2, 1, 0]).unwrap();
        assert_eq!(d.i0(), vec![1]);
        assert_eq!(d.i1(), vec![0]);
        assert_eq!(d.i_minus1(), vec![2]);
        let d = SatakeDiagram::split(a(1)).unwrap();
        assert_eq!(d.i0(), vec![0]);
        let d = SatakeDiagram::new(a(2), vec![1, 0]).unwrap();
        assert_eq!(d.c(0, d.tau(0)), -1);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            SatakeDiagram::new(a(3), vec![1, 0, 2]).unwrap_err(),
            SatakeError::TauNotAutomorphism(1, 3)
        );
        assert_eq!(
            SatakeDiagram::new(a(2), vec![1, 1]).unwrap_err(),
            SatakeError::TauNotInvolution
        );
        let cycle = vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]];
        assert!(matches!(
            SatakeDiagram::split(cycle),
            Err(SatakeError::NotADE(_))
        ));
        let b2 = vec![vec![2, -2], vec![-1, 2]];
        assert!(matches!(
            SatakeDiagram::split(b2),
            Err(SatakeError::NotADE(_))
        ));
        // affine D4~ star
        let mut star = vec![vec![0; 5]; 5];
        for i in 0..5 {
            star[i][i] = 2;
        }
        for k in 1..5 {
            star[0][k] = -1;
            star[k][0] = -1;
        }
        assert!(matches!(
            SatakeDiagram::split(star),
            Err(SatakeError::NotADE(_))
        ));
    }

    #[test]
    fn d_and_e_are_ade() {
        for n in 4..=7 {
            SatakeDiagram::split(cartan_matrix(CartanType::D, n).unwrap()).unwrap();
        }
        for n in 6..=8 {
            SatakeDiagram::split(cartan_matrix(CartanType::E, n).unwrap()).unwrap();
        }
        // E6 with its diagram involution
        SatakeDiagram::new(
            cartan_matrix(CartanType::E, 6).unwrap(),
            vec![5, 1, 4, 3, 2, 0],
        )
        .unwrap();
    }

    #[test]
    fn shift_solutions() {
        let d = SatakeDiagram::split(a(1)).unwrap();
        assert_eq!(solve_shift(&d, &[2], &[0]).unwrap(), vec![1]);
        assert_eq!(
            solve_shift(&d, &[1], &[0]).unwrap_err(),
            SatakeError::NotInCorootLattice
        );
        assert_eq!(
            solve_shift(&d, &[-1], &[-3]).unwrap_err(),
            SatakeError::NotDominant(1)
        );
        assert_eq!(
            solve_shift(&d, &[0], &[2]).unwrap_err(),
            SatakeError::NegativeMultiplicity(1, -1)
        );
        let d = SatakeDiagram::split(a(2)).unwrap();
        assert_eq!(solve_shift(&d, &[1, 1], &[0, 0]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn wp_assignment() {
        let d = SatakeDiagram::split(a(2)).unwrap();
        assert_eq!(
            assign_wp(&d, &Orientation::default_for(&d)).unwrap(),
            vec![0, 0]
        );
        let d = SatakeDiagram::new(a(2), vec![1, 0]).unwrap();
        let o = Orientation::from_arrows(&d, [(0, 1)]).unwrap();
        assert_eq!(assign_wp(&d, &o).unwrap(), vec![-1, 1]);
        let d = SatakeDiagram::new(a(3), vec![2, 1, 0]).unwrap();
        assert_eq!(
            assign_wp(&d, &Orientation::default_for(&d)).unwrap(),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn orientation_rule() {
        let d = SatakeDiagram::new(a(3), vec![2, 1, 0]).unwrap();
        // 1 -> 2 forces 2 -> 3
        assert_eq!(
            Orientation::from_arrows(&d, [(0, 1), (2, 1)]).unwrap_err(),
            SatakeError::IncompatibleOrientation(1, 2)
        );
        assert!(Orientation::from_arrows(&d, [(1, 0), (1, 2)]).is_ok());
    }

    #[test]
    fn theta_constraints() {
        let d = SatakeDiagram::split(a(2)).unwrap();
        validate_theta(&d, &[1, 0]).unwrap();
        assert_eq!(
            validate_theta(&d, &[1, 1]).unwrap_err(),
            SatakeError::AdjacentThetas(1, 2)
        );
        let d = SatakeDiagram::new(a(2), vec![1, 0]).unwrap();
        assert_eq!(
            validate_theta(&d, &[1, 0]).unwrap_err(),
            SatakeError::ThetaOutsideFixedSet(1)
        );
    }

    #[test]
    fn catalog_is_consistent() {
        let cat = build_catalog();
        assert_eq!(cat.len(), 10);
        for inst in &cat {
            assert_eq!(inst.recomputed_ell(), inst.ell, "{}", inst.name);
            assert!(inst.v.iter().all(|&x| x == 1 || x == 2));
            validate_theta(&inst.diagram, &inst.theta).unwrap();
            // ℘ is odd under τ on A_2n pairs
            for i in 0..inst.rank() {
                if inst.c(i, inst.tau(i)) == -1 {
                    assert_eq!(inst.wp2[inst.tau(i)], -inst.wp2[i]);
                }
            }
        }
        let qa2 = catalog_instance("qsA2-v11").unwrap();
        assert_eq!((qa2.v.clone(), qa2.w.clone()), (vec![1, 1], vec![1, 1]));
        let qa4 = catalog_instance("qsA4-v1111").unwrap();
        assert_eq!(qa4.v, vec![1, 1, 1, 1]);
    }
}
