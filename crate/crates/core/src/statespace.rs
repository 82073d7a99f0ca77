//! Pure states of distinguishable qudits, bosons and fermions.
//!
//! Amplitudes are always stored in the orthonormal basis of the sector:
//!
//! * distinguishable: `|i₁…i_L⟩`, lexicographic with `i₁` most significant;
//! * bosonic: occupation vectors `(n₁,…,n_N)` with `Σ nⱼ = L`, lexicographically
//!   decreasing, each mapped to its normalized symmetrization;
//! * fermionic: `L`-subsets of `{1…N}` in lexicographic order, each mapped to
//!   the normalized antisymmetrization with ascending-index sign `+1`.
//!
//! Identical-particle operations embed into the tensor power `(ℂᴺ)^{⊗L}`, act
//! there and project back.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, ONE, ZERO};

/// Norms below this are treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorKind {
    Distinguishable,
    Bosonic,
    Fermionic,
}

impl fmt::Display for SectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SectorKind::Distinguishable => "distinguishable",
            SectorKind::Bosonic => "bosonic",
            SectorKind::Fermionic => "fermionic",
        })
    }
}

impl std::str::FromStr for SectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinguishable" => Ok(SectorKind::Distinguishable),
            "bosonic" => Ok(SectorKind::Bosonic),
            "fermionic" => Ok(SectorKind::Fermionic),
            other => Err(Error::Parse(format!("unknown sector kind `{other}`"))),
        }
    }
}

/// Particle statistics, number of particles `L` and local dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sector {
    pub kind: SectorKind,
    pub parties: usize,
    pub local_dim: usize,
}

impl Sector {
    /// Fermionic sectors accept `parties = 0` (the one-dimensional top/bottom
    /// form produced by the Hodge dual); every other sector needs `parties ≥ 1`.
    pub fn new(kind: SectorKind, parties: usize, local_dim: usize) -> Result<Self> {
        if local_dim == 0 {
            return Err(Error::InvalidSector("local dimension must be positive".into()));
        }
        if parties == 0 && kind != SectorKind::Fermionic {
            return Err(Error::InvalidSector("number of parties must be positive".into()));
        }
        if kind == SectorKind::Fermionic && local_dim < parties {
            return Err(Error::InvalidSector(format!("fermionic sector needs N ≥ L (N = {local_dim}, L = {parties})")));
        }
        Ok(Sector { kind, parties, local_dim })
    }

    pub fn distinguishable(parties: usize, local_dim: usize) -> Result<Self> {
        Sector::new(SectorKind::Distinguishable, parties, local_dim)
    }

    pub fn bosonic(parties: usize, local_dim: usize) -> Result<Self> {
        Sector::new(SectorKind::Bosonic, parties, local_dim)
    }

    pub fn fermionic(parties: usize, local_dim: usize) -> Result<Self> {
        Sector::new(SectorKind::Fermionic, parties, local_dim)
    }

    /// `L` distinguishable qubits.
    pub fn qubits(parties: usize) -> Self {
        Sector { kind: SectorKind::Distinguishable, parties: parties.max(1), local_dim: 2 }
    }

    pub fn is_identical(&self) -> bool {
        self.kind != SectorKind::Distinguishable
    }

    /// Dimension of the sector basis.
    pub fn dim(&self) -> usize {
        let (l, n) = (self.parties, self.local_dim);
        match self.kind {
            SectorKind::Distinguishable => n.pow(l as u32),
            SectorKind::Bosonic => binomial(n + l - 1, l),
            SectorKind::Fermionic => binomial(n, l),
        }
    }

    /// Dimension `N^L` of the ambient tensor power.
    pub fn tensor_dim(&self) -> usize {
        self.local_dim.pow(self.parties as u32)
    }

    /// Number of independent one-body blocks of the momentum map:
    /// `L` for distinguishable parties, one shared block for identical particles.
    pub fn momentum_blocks(&self) -> usize {
        if self.is_identical() {
            1
        } else {
            self.parties
        }
    }

    /// Number of tensor slots carried by each momentum block.
    pub fn block_multiplicity(&self) -> usize {
        if self.is_identical() {
            self.parties
        } else {
            1
        }
    }

    /// Real dimension of the local group `SL(N,ℂ)^{×L}` (or the diagonal
    /// `SL(N,ℂ)` for identical particles).
    pub fn group_real_dim(&self) -> usize {
        let n = self.local_dim;
        2 * (n * n - 1) * self.momentum_blocks()
    }

    /// Real dimension of the projective state space.
    pub fn projective_real_dim(&self) -> usize {
        2 * (self.dim() - 1)
    }

    /// Labels of the canonical basis: digit strings, occupation vectors or
    /// ascending 1-based subsets depending on the sector kind.
    pub fn basis_labels(&self) -> Vec<Vec<usize>> {
        match self.kind {
            SectorKind::Distinguishable => {
                (0..self.dim()).map(|idx| digits(idx, self.parties, self.local_dim)).collect()
            }
            SectorKind::Bosonic => occupations(self.parties, self.local_dim),
            SectorKind::Fermionic => subsets(self.local_dim, self.parties),
        }
    }

    /// Index of a basis label (see [`Sector::basis_labels`]).
    pub fn basis_index(&self, label: &[usize]) -> Option<usize> {
        self.basis_labels().iter().position(|l| l == label)
    }

    /// Local levels (0-based) occupied in each tensor slot of a basis label,
    /// sorted ascending for identical particles.
    pub(crate) fn slot_levels(&self, label: &[usize]) -> Vec<usize> {
        match self.kind {
            SectorKind::Distinguishable => label.to_vec(),
            SectorKind::Bosonic => {
                label.iter().enumerate().flat_map(|(level, &n)| std::iter::repeat_n(level, n)).collect()
            }
            SectorKind::Fermionic => label.iter().map(|&s| s - 1).collect(),
        }
    }

    pub(crate) fn embedding(&self) -> Arc<Embedding> {
        static CACHE: OnceLock<Mutex<HashMap<Sector, Arc<Embedding>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("embedding cache poisoned");
        guard.entry(*self).or_insert_with(|| Arc::new(Embedding::build(self))).clone()
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(L={}, N={})", self.kind, self.parties, self.local_dim)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn digits(mut idx: usize, parties: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; parties];
    for slot in (0..parties).rev() {
        out[slot] = idx % n;
        idx /= n;
    }
    out
}

fn tensor_index(levels: &[usize], n: usize) -> usize {
    levels.iter().fold(0, |acc, &l| acc * n + l)
}

/// Occupation vectors summing to `l`, lexicographically decreasing.
fn occupations(l: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(rem);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=rem).rev() {
            prefix.push(first);
            rec(rem - first, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(l, n, &mut Vec::new(), &mut out);
    out
}

/// `l`-subsets of `{1…n}` in lexicographic order.
fn subsets(n: usize, l: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, l: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == l {
            out.push(prefix.clone());
            return;
        }
        for s in start..=n {
            prefix.push(s);
            rec(s + 1, n, l, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, l, &mut Vec::new(), &mut out);
    out
}

fn permutations(items: &[usize]) -> Vec<(Vec<usize>, f64)> {
    // Heap's algorithm with parity tracking.
    let mut out = Vec::new();
    let mut a = items.to_vec();
    let n = a.len();
    let mut cstack = vec![0usize; n];
    let mut sign = 1.0;
    out.push((a.clone(), sign));
    let mut i = 0;
    while i < n {
        if cstack[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(cstack[i], i);
            }
            sign = -sign;
            out.push((a.clone(), sign));
            cstack[i] += 1;
            i = 0;
        } else {
            cstack[i] = 0;
            i += 1;
        }
    }
    out
}

/// Sparse isometry from the sector basis into the tensor power.
#[derive(Debug)]
pub(crate) struct Embedding {
    tensor_dim: usize,
    columns: Vec<Vec<(usize, f64)>>,
}

impl Embedding {
    fn build(sector: &Sector) -> Self {
        let n = sector.local_dim;
        let labels = sector.basis_labels();
        let columns = match sector.kind {
            SectorKind::Distinguishable => (0..labels.len()).map(|i| vec![(i, 1.0)]).collect(),
            SectorKind::Bosonic => labels
                .iter()
                .map(|occ| {
                    let levels = sector.slot_levels(occ);
                    let mut idx: Vec<usize> =
                        permutations(&levels).into_iter().map(|(p, _)| tensor_index(&p, n)).collect();
                    idx.sort_unstable();
                    idx.dedup();
                    let w = 1.0 / (idx.len() as f64).sqrt();
                    idx.into_iter().map(|i| (i, w)).collect()
                })
                .collect(),
            SectorKind::Fermionic => labels
                .iter()
                .map(|set| {
                    let levels = sector.slot_levels(set);
                    let perms = permutations(&levels);
                    let w = 1.0 / (perms.len() as f64).sqrt();
                    let mut col: Vec<(usize, f64)> =
                        perms.into_iter().map(|(p, s)| (tensor_index(&p, n), s * w)).collect();
                    col.sort_by_key(|e| e.0);
                    col
                })
                .collect(),
        };
        Embedding { tensor_dim: sector.tensor_dim(), columns }
    }

    pub(crate) fn embed(&self, amps: &CVec) -> CVec {
        let mut out = CVec::zeros(self.tensor_dim);
        for (col, &a) in self.columns.iter().zip(amps.iter()) {
            for &(i, w) in col {
                out[i] += a * w;
            }
        }
        out
    }

    pub(crate) fn project(&self, tensor: &CVec) -> CVec {
        CVec::from_iterator(
            self.columns.len(),
            self.columns.iter().map(|col| col.iter().map(|&(i, w)| tensor[i] * w).sum::<C64>()),
        )
    }
}

/// Complex amplitude vector over a sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    sector: Sector,
    amplitudes: CVec,
}

impl PureState {
    /// Wraps raw amplitudes without normalizing.
    pub fn new(sector: Sector, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != sector.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes given, sector {} has dimension {}",
                amplitudes.len(),
                sector,
                sector.dim()
            )));
        }
        Ok(PureState { sector, amplitudes })
    }

    pub fn from_real(sector: Sector, amplitudes: &[f64]) -> Result<Self> {
        PureState::new(sector, CVec::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0))))
    }

    /// Sum of weighted basis vectors given by their labels, normalized.
    pub fn from_labels(sector: Sector, terms: &[(C64, &[usize])]) -> Result<Self> {
        let labels = sector.basis_labels();
        let mut amps = CVec::zeros(sector.dim());
        for (w, label) in terms {
            let idx = labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::ShapeMismatch(format!("label {label:?} is not a basis label of {sector}")))?;
            amps[idx] += *w;
        }
        PureState::new(sector, amps)?.normalized()
    }

    /// Basis vector number `index` of the sector.
    pub fn basis(sector: Sector, index: usize) -> Result<Self> {
        let dim = sector.dim();
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, limit: dim });
        }
        let mut amps = CVec::zeros(dim);
        amps[index] = ONE;
        Ok(PureState { sector, amplitudes: amps })
    }

    /// Normalized Gaussian random state.
    pub fn random<R: Rng + ?Sized>(sector: Sector, rng: &mut R) -> Self {
        let amps = linalg::random_complex_vector(sector.dim(), rng);
        let n = linalg::vec_norm(&amps);
        PureState { sector, amplitudes: amps.unscale(n) }
    }

    /// Re-expresses a tensor-power vector in the sector basis (orthogonal projection).
    pub fn from_tensor(sector: Sector, tensor: &CVec) -> Result<Self> {
        if tensor.len() != sector.tensor_dim() {
            return Err(Error::ShapeMismatch(format!("tensor of length {} for sector {}", tensor.len(), sector)));
        }
        let amps = if sector.is_identical() { sector.embedding().project(tensor) } else { tensor.clone() };
        Ok(PureState { sector, amplitudes: amps })
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }

    pub fn normalized(&self) -> Result<Self> {
        normalize(self)
    }

    /// Amplitudes in the tensor power `(ℂᴺ)^{⊗L}`.
    pub fn tensor(&self) -> CVec {
        if self.sector.is_identical() {
            self.sector.embedding().embed(&self.amplitudes)
        } else {
            self.amplitudes.clone()
        }
    }

    /// Phase-aligned distance between the rays of two states.
    pub fn ray_distance(&self, other: &PureState) -> f64 {
        linalg::ray_distance(&self.amplitudes, &other.amplitudes)
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: CVec) -> Self {
        PureState { sector: self.sector, amplitudes }
    }
}

pub fn normalize(state: &PureState) -> Result<PureState> {
    let n = state.norm();
    if n.is_nan() || n < ZERO_NORM {
        return Err(Error::ZeroState(ZERO_NORM));
    }
    Ok(state.with_amplitudes(state.amplitudes.unscale(n)))
}

pub fn inner(a: &PureState, b: &PureState) -> Result<C64> {
    if a.sector != b.sector {
        return Err(Error::SectorMismatch(format!("{} vs {}", a.sector, b.sector)));
    }
    Ok(linalg::dot(&a.amplitudes, &b.amplitudes))
}

/// An `N×N` matrix acting on one party (the party index is ignored for
/// identical particles, where the operator acts diagonally on every slot).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    pub party: usize,
    pub matrix: CMat,
}

impl LocalOperator {
    pub fn new(party: usize, matrix: CMat) -> Self {
        LocalOperator { party, matrix }
    }

    /// Operator for identical particles.
    pub fn diagonal(matrix: CMat) -> Self {
        LocalOperator { party: 0, matrix }
    }

    /// One operator per party, in party order.
    pub fn per_party(matrices: impl IntoIterator<Item = CMat>) -> Vec<LocalOperator> {
        matrices.into_iter().enumerate().map(|(p, m)| LocalOperator::new(p, m)).collect()
    }
}

/// Applies `m` to tensor slot `slot` of a vector in `(ℂⁿ)^{⊗slots}`.
pub(crate) fn apply_on_slot(tensor: &CVec, n: usize, slots: usize, slot: usize, m: &CMat) -> CVec {
    let inner = n.pow((slots - 1 - slot) as u32);
    let outer = tensor.len() / (inner * n);
    let mut out = CVec::zeros(tensor.len());
    let mut buf = vec![ZERO; n];
    for o in 0..outer {
        let base = o * n * inner;
        for r in 0..inner {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = tensor[base + i * inner + r];
            }
            for i in 0..n {
                let mut acc = ZERO;
                for (j, b) in buf.iter().enumerate() {
                    acc += m[(i, j)] * b;
                }
                out[base + i * inner + r] = acc;
            }
        }
    }
    out
}

/// Linear action of local operators. The result is not renormalized.
///
/// Distinguishable sectors take at most one operator per party (unlisted
/// parties get the identity); identical-particle sectors take exactly one
/// operator, applied to every particle.
pub fn apply_local(ops: &[LocalOperator], state: &PureState) -> Result<PureState> {
    let sector = state.sector;
    let n = sector.local_dim;
    for op in ops {
        if op.matrix.nrows() != n || op.matrix.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "operator is {}×{}, local dimension is {n}",
                op.matrix.nrows(),
                op.matrix.ncols()
            )));
        }
    }
    if sector.is_identical() {
        if ops.len() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "identical particles take exactly one operator, got {}",
                ops.len()
            )));
        }
        let mut t = state.tensor();
        for slot in 0..sector.parties {
            t = apply_on_slot(&t, n, sector.parties, slot, &ops[0].matrix);
        }
        return PureState::from_tensor(sector, &t);
    }
    let mut seen = vec![false; sector.parties];
    let mut t = state.amplitudes.clone();
    for op in ops {
        if op.party >= sector.parties {
            return Err(Error::ShapeMismatch(format!(
                "operator for party {} in a {}-party system",
                op.party, sector.parties
            )));
        }
        if std::mem::replace(&mut seen[op.party], true) {
            return Err(Error::ShapeMismatch(format!("two operators for party {}", op.party)));
        }
        t = apply_on_slot(&t, n, sector.parties, op.party, &op.matrix);
    }
    Ok(state.with_amplitudes(t))
}

/// Dicke state `|k, L⟩`: the symmetric two-level state with `k` excitations.
pub fn dicke(k: usize, parties: usize) -> Result<PureState> {
    let sector = Sector::bosonic(parties, 2)?;
    if k > parties {
        return Err(Error::IndexOutOfRange { index: k, limit: parties });
    }
    // Occupation vectors (L-k, k) are ordered by decreasing n₁, i.e. by k.
    PureState::basis(sector, k)
}

/// Particle–hole (Hodge) dual on a fermionic sector: `|S⟩ ↦ sgn(S,Sᶜ)·|Sᶜ⟩`.
pub fn hodge_dual(state: &PureState) -> Result<PureState> {
    let sector = state.sector;
    if sector.kind != SectorKind::Fermionic {
        return Err(Error::SectorMismatch(format!("Hodge dual needs a fermionic sector, got {sector}")));
    }
    let n = sector.local_dim;
    let target = Sector::fermionic(n - sector.parties, n)?;
    let target_labels = target.basis_labels();
    let mut amps = CVec::zeros(target.dim());
    for (set, amp) in sector.basis_labels().iter().zip(state.amplitudes.iter()) {
        let complement: Vec<usize> = (1..=n).filter(|s| !set.contains(s)).collect();
        let mut perm = set.clone();
        perm.extend_from_slice(&complement);
        let idx = target_labels.iter().position(|l| *l == complement).expect("complement is a basis label");
        amps[idx] += amp * permutation_sign(&perm);
    }
    PureState::new(target, amps)
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Product state `|l₁ l₂ … l_L⟩` of distinguishable qudits.
pub fn product_state(local_dim: usize, levels: &[usize]) -> Result<PureState> {
    let sector = Sector::distinguishable(levels.len(), local_dim)?;
    if let Some(&bad) = levels.iter().find(|&&l| l >= local_dim) {
        return Err(Error::IndexOutOfRange { index: bad, limit: local_dim });
    }
    PureState::basis(sector, tensor_index(levels, local_dim))
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `L` qubits.
pub fn ghz(parties: usize) -> PureState {
    let sector = Sector::qubits(parties);
    let mut amps = CVec::zeros(sector.dim());
    amps[0] = c(1.0, 0.0);
    amps[sector.dim() - 1] = c(1.0, 0.0);
    PureState::new(sector, amps).and_then(|s| s.normalized()).expect("GHZ is well formed")
}

/// Uniform superposition of single excitations on `L` qubits.
pub fn w_state(parties: usize) -> PureState {
    let sector = Sector::qubits(parties);
    let mut amps = CVec::zeros(sector.dim());
    for p in 0..parties {
        amps[1 << p] = c(1.0, 0.0);
    }
    PureState::new(sector, amps).and_then(|s| s.normalized()).expect("W is well formed")
}

/// `(1/√k) Σ_{i<k} |i, i⟩` on `ℂᴺ ⊗ ℂᴺ`.
pub fn max_entangled(local_dim: usize, rank: usize) -> Result<PureState> {
    if rank == 0 || rank > local_dim {
        return Err(Error::IndexOutOfRange { index: rank, limit: local_dim });
    }
    let sector = Sector::distinguishable(2, local_dim)?;
    let mut amps = CVec::zeros(sector.dim());
    for i in 0..rank {
        amps[i * local_dim + i] = c(1.0, 0.0);
    }
    PureState::new(sector, amps)?.normalized()
}

/// Two-boson state `(1/√k) Σ_{i<k} |i⟩∨|i⟩` in `Sym²(ℂᴺ)`.
pub fn boson_pair(local_dim: usize, rank: usize) -> Result<PureState> {
    if rank == 0 || rank > local_dim {
        return Err(Error::IndexOutOfRange { index: rank, limit: local_dim });
    }
    let sector = Sector::bosonic(2, local_dim)?;
    let mut tensor = CVec::zeros(sector.tensor_dim());
    for i in 0..rank {
        tensor[i * local_dim + i] = c(1.0, 0.0);
    }
    PureState::from_tensor(sector, &tensor)?.normalized()
}

/// Two-fermion state `(1/√k) Σ_{i≤k} |2i−1⟩∧|2i⟩` in `Λ²(ℂᴺ)`.
pub fn fermion_pair(local_dim: usize, rank: usize) -> Result<PureState> {
    if rank == 0 || 2 * rank > local_dim {
        return Err(Error::IndexOutOfRange { index: rank, limit: local_dim / 2 });
    }
    let sector = Sector::fermionic(2, local_dim)?;
    let labels = sector.basis_labels();
    let mut amps = CVec::zeros(sector.dim());
    for i in 1..=rank {
        let idx = labels.iter().position(|l| *l == [2 * i - 1, 2 * i]).expect("pair label");
        amps[idx] = c(1.0, 0.0);
    }
    PureState::new(sector, amps)?.normalized()
}

/// JSON document for a pure state.
///
/// ```json
/// {"sector": "distinguishable", "parties": 3, "local_dim": 2,
///  "amplitudes": [[0.7071, 0], [0, 0], ...]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateDocument {
    pub sector: SectorKind,
    pub parties: usize,
    pub local_dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateDocument {
    pub fn from_state(state: &PureState) -> Self {
        let s = state.sector;
        StateDocument {
            sector: s.kind,
            parties: s.parties,
            local_dim: s.local_dim,
            amplitudes: linalg::vector_to_pairs(&state.amplitudes),
        }
    }

    /// Validates and normalizes.
    pub fn to_state(&self) -> Result<PureState> {
        if self.amplitudes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite amplitude".into()));
        }
        let sector = Sector::new(self.sector, self.parties, self.local_dim)?;
        let amps = CVec::from_iterator(self.amplitudes.len(), self.amplitudes.iter().map(|p| c(p[0], p[1])));
        PureState::new(sector, amps)?.normalized()
    }

    pub fn from_json(text: &str) -> Result<PureState> {
        let doc: StateDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.to_state()
    }

    pub fn to_json(state: &PureState) -> String {
        serde_json::to_string(&StateDocument::from_state(state)).expect("state document serializes")
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateDocument::from_state(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        StateDocument::deserialize(d)?.to_state().map_err(serde::de::Error::custom)
    }
}
