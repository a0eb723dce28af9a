//! The two construction drivers: random search for `B_2` with a fixed `B_1`,
//! and the linear system `B_2'∘A_1 + B_1∘A_2' = 0` attached to a linear `A_1`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::emod::{BettiTable, EMatrix, EMatrixJson};
use crate::error::{Error, Result};
use crate::extalg::{basis_of_len, binomial, ExtElem};
use crate::ff::{EchelonSpace, FMatrix, Field, PrimeField};
use crate::monad::{
    check_ab, homology_dimensions, ideal_of_surface, surface_hilbert_polynomial, Monad, SurfaceIdeal, A_SOURCE,
    B_SOURCE, B_TABLE, B_TARGET, CHI, DEGREE, SECTIONAL_GENUS,
};
use crate::poly::{HilbertPolynomial, Smoothness};

/// Number of coefficients of `A_2'` (eight entries in `∧²V`).
pub const A2_UNKNOWNS: usize = 80;
/// Number of coefficients of `B_2'` (six entries in `∧²V`).
pub const B2_UNKNOWNS: usize = 60;
/// Equations: twelve entries of the composite, each in `∧³V`.
pub const EQUATIONS: usize = 120;

/// Dimension of the automorphism group acting on monads of this type:
/// `GL_4` (16), the triangular group `H` on `2E(2) ⊕ 2E(1)` (4 + 4 + 20), and `GL_3` (9).
pub const GROUP_DIM: usize = 53;

/// Deterministic per-trial generator: stream `index` of the ChaCha8 key `master`.
pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

pub fn random_elem<R: Rng>(k: usize, f: &PrimeField, rng: &mut R) -> ExtElem {
    let coeffs: Vec<u32> = (0..binomial(5, k)).map(|_| rng.gen_range(0..f.p())).collect();
    ExtElem::from_graded(k, &coeffs)
}

/// A homogeneous matrix with uniformly random entries of the right degrees.
pub fn random_ematrix<R: Rng>(f: &PrimeField, source: &[i32], target: &[i32], rng: &mut R) -> EMatrix {
    let mut m = EMatrix::zero(f.clone(), source.to_vec(), target.to_vec());
    for (r, &b) in target.iter().enumerate() {
        for (c, &a) in source.iter().enumerate() {
            let k = a - b;
            if (0..=5).contains(&k) {
                m.set(r, c, random_elem(k as usize, f, rng));
            }
        }
    }
    m
}

/// A random 3×2 block with entries in `∧²V` (`2E(2) → 3E`).
pub fn random_b2<R: Rng>(f: &PrimeField, rng: &mut R) -> EMatrix {
    random_ematrix(f, &[2, 2], &[0, 0, 0], rng)
}

/// A random 2×4 linear matrix (`4E(3) → 2E(2)`).
pub fn random_a1<R: Rng>(f: &PrimeField, rng: &mut R) -> EMatrix {
    random_ematrix(f, &[3, 3, 3, 3], &[2, 2], rng)
}

/// Necessary condition for the target table [`B_TABLE`]: the degree −3 flattening `2V ⊕ 2∧²V → 3∧³V`
/// has rank exactly 26.
pub fn quick_filter(b: &EMatrix) -> bool {
    b.flatten(-3).rank(b.field()) == 26
}

/// The 120×140 coefficient matrix of `B_2'∘A_1 + B_1∘A_2'`.
///
/// Rows: entry `(r, c)` of the 3×4 composite times the `∧³V` basis.
/// Columns: the 80 coefficients of `A_2'` (entry `(k, c)`, then `∧²V` basis),
/// followed by the 60 coefficients of `B_2'` (entry `(r, k)`, then `∧²V` basis).
pub fn build_linear_system(a1: &EMatrix, b1: &EMatrix) -> Result<FMatrix> {
    check_shape(a1, &[3, 3, 3, 3], &[2, 2], "A_1")?;
    check_shape(b1, &[1, 1], &[0, 0, 0], "B_1")?;
    let f = a1.field();
    let basis2 = basis_of_len(2);
    let mut m = FMatrix::zeros(EQUATIONS, A2_UNKNOWNS + B2_UNKNOWNS);
    let row = |r: usize, c: usize, e: &ExtElem| -> Vec<(usize, u32)> {
        e.graded_coeffs(3)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v != 0)
            .map(|(t, v)| ((r * 4 + c) * 10 + t, v))
            .collect()
    };
    for r in 0..3 {
        for c in 0..4 {
            // B_1[r][k] ∧ A_2'[k][c]
            for k in 0..2 {
                for (j, mono) in basis2.iter().enumerate() {
                    let prod = b1.get(r, k).wedge(&ExtElem::monomial(*mono, 1), f);
                    let col = (k * 4 + c) * 10 + j;
                    for (i, v) in row(r, c, &prod) {
                        m.set(i, col, f.add(m.get(i, col), v));
                    }
                }
            }
            // B_2'[r][k] ∧ A_1[k][c]
            for k in 0..2 {
                for (j, mono) in basis2.iter().enumerate() {
                    let prod = ExtElem::monomial(*mono, 1).wedge(a1.get(k, c), f);
                    let col = A2_UNKNOWNS + (r * 2 + k) * 10 + j;
                    for (i, v) in row(r, c, &prod) {
                        m.set(i, col, f.add(m.get(i, col), v));
                    }
                }
            }
        }
    }
    Ok(m)
}

fn check_shape(m: &EMatrix, source: &[i32], target: &[i32], name: &str) -> Result<()> {
    if m.source().twists != source || m.target().twists != target {
        return Err(Error::Dimension(format!(
            "{name} must map {source:?} -> {target:?}, got {:?} -> {:?}",
            m.source().twists,
            m.target().twists
        )));
    }
    Ok(())
}

/// `N(A_1)`: the rank of the 120×140 system.
#[allow(non_snake_case)]
pub fn N_invariant(a1: &EMatrix, b1: &EMatrix) -> Result<usize> {
    Ok(build_linear_system(a1, b1)?.rank(a1.field()))
}

/// Decode 60 `B_2'` coordinates into a 3×2 block.
pub fn b2_from_coords(f: &PrimeField, coords: &[u32]) -> EMatrix {
    assert_eq!(coords.len(), B2_UNKNOWNS);
    let mut m = EMatrix::zero(f.clone(), vec![2, 2], vec![0, 0, 0]);
    for r in 0..3 {
        for k in 0..2 {
            let o = (r * 2 + k) * 10;
            m.set(r, k, ExtElem::from_graded(2, &coords[o..o + 10]));
        }
    }
    m
}

/// Decode 80 `A_2'` coordinates into a 2×4 block with entries in `∧²V`.
pub fn a2_from_coords(f: &PrimeField, coords: &[u32]) -> EMatrix {
    assert_eq!(coords.len(), A2_UNKNOWNS);
    let mut m = EMatrix::zero(f.clone(), vec![3, 3, 3, 3], vec![1, 1]);
    for k in 0..2 {
        for c in 0..4 {
            let o = (k * 4 + c) * 10;
            m.set(k, c, ExtElem::from_graded(2, &coords[o..o + 10]));
        }
    }
    m
}

pub fn b2_coords(b2: &EMatrix) -> Vec<u32> {
    let mut v = Vec::with_capacity(B2_UNKNOWNS);
    for r in 0..3 {
        for k in 0..2 {
            v.extend(b2.get(r, k).graded_coeffs(2));
        }
    }
    v
}

/// The 20-dimensional space `U_{B_1}` of pairs of `E`-combinations of the
/// columns of `B_1`, as `B_2'`-coordinates: `B_2' = B_1·C` with `C` a 2×2 linear matrix.
pub fn u_b1_space(b1: &EMatrix) -> EchelonSpace {
    let f = b1.field();
    let mut span = EchelonSpace::new(B2_UNKNOWNS);
    for i in 0..2 {
        for k in 0..2 {
            for g in 0..5 {
                // C has a single entry e_g at (i, k)
                let mut c = EMatrix::zero(f.clone(), vec![2, 2], vec![1, 1]);
                c.set(i, k, ExtElem::generator(g));
                let b2 = b1.compose(&c).expect("shapes agree");
                span.insert(&b2_coords(&b2), f);
            }
        }
    }
    span
}

/// Solution space of the system and its projection onto the `B_2'` coordinates.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub n: usize,
    pub solutions: Vec<Vec<u32>>,
    pub b_projection: EchelonSpace,
}

impl SolutionSpace {
    pub fn new(a1: &EMatrix, b1: &EMatrix) -> Result<Self> {
        let f = a1.field();
        let sys = build_linear_system(a1, b1)?;
        let solutions = sys.kernel_basis(f);
        let n = A2_UNKNOWNS + B2_UNKNOWNS - solutions.len();
        let mut b_projection = EchelonSpace::new(B2_UNKNOWNS);
        for s in &solutions {
            b_projection.insert(&s[A2_UNKNOWNS..], f);
        }
        Ok(Self { n, solutions, b_projection })
    }

    /// `140 - N`.
    pub fn dim(&self) -> usize {
        self.solutions.len()
    }

    /// Effective family dimension after removing `U_{B_1}` and scalars: `119 - N`.
    pub fn effective_parameters(&self) -> usize {
        (A2_UNKNOWNS + B2_UNKNOWNS - self.n).saturating_sub(1 + 20)
    }
}

/// A random `B_2'` from the solution space, resampled until it leaves `U_{B_1}`.
pub fn sample_b2_from_solutions<R: Rng>(
    space: &SolutionSpace,
    b1: &EMatrix,
    rng: &mut R,
) -> Result<EMatrix> {
    let f = b1.field();
    let u = u_b1_space(b1);
    if space.n >= EQUATIONS {
        return Err(Error::Dimension("N = 120: every solution is a B_1-combination".into()));
    }
    for _ in 0..64 {
        let mut v = vec![0u32; B2_UNKNOWNS];
        for row in space.b_projection.basis() {
            let c = rng.gen_range(0..f.p());
            f.axpy(&mut v, row, c);
        }
        if !u.contains(&v, f) {
            return Ok(b2_from_coords(f, &v));
        }
    }
    Err(Error::Dimension("solution projection lies inside U_{B_1}".into()))
}

/// `B = (B_2 | B_1)`.
pub fn assemble_b(b2: &EMatrix, b1: &EMatrix) -> EMatrix {
    b2.hconcat(b1).expect("both blocks map to 3E")
}

/// The degree −3 conditions of Construction I.
///
/// `T = 3∧³V / (B_1 ∧ 2∧²V)` is 10-dimensional. A `B_2` passes
/// [`quick_filter`] exactly when `v ↦ B_2 ∧ v` has rank 6 in `T`, i.e. when
/// its image is the kernel of a 4-dimensional quotient `T → U`. A trial draws
/// `U` uniformly from the Grassmannian of 4-dimensional quotients and then
/// `B_2` uniformly from the pairs of columns whose image dies in `U`.
#[derive(Clone, Debug)]
pub struct QuotientSampler {
    field: PrimeField,
    /// Rows are linear forms on `3∧³V` vanishing on the `B_1` part (a basis of `T*`).
    t_dual: Vec<Vec<u32>>,
}

/// `dim ker g` above which a quotient admits columns beyond the `B_1`-multiples.
pub const GENERIC_KERNEL: usize = 10;

impl QuotientSampler {
    pub fn new(b1: &EMatrix) -> Self {
        let f = b1.field().clone();
        let im = b1.flatten(-3);
        let t_dual = im.transpose().kernel_basis(&f);
        Self { field: f, t_dual }
    }

    pub fn quotient_dim(&self) -> usize {
        self.t_dual.len()
    }

    /// The map `g : 3∧²V → Hom(V, U)`, `b ↦ (v ↦ π(b ∧ v))`, as a 20×30 matrix.
    pub fn g_matrix(&self, pi: &[Vec<u32>]) -> FMatrix {
        let f = &self.field;
        let basis2 = basis_of_len(2);
        let mut g = FMatrix::zeros(RANK_V * pi.len(), 30);
        for r in 0..3 {
            for (j, mono) in basis2.iter().enumerate() {
                let col = r * 10 + j;
                for v in 0..RANK_V {
                    let prod = ExtElem::monomial(*mono, 1).wedge(&ExtElem::generator(v), f);
                    let coords = prod.graded_coeffs(3);
                    for (u, row) in pi.iter().enumerate() {
                        let val = (0..10).fold(0, |acc, t| f.add(acc, f.mul(row[r * 10 + t], coords[t])));
                        g.set(v * pi.len() + u, col, val);
                    }
                }
            }
        }
        g
    }

    /// A uniformly random surjection `3∧³V → T → F⁴`.
    pub fn random_quotient<R: Rng>(&self, rng: &mut R) -> Vec<Vec<u32>> {
        let f = &self.field;
        let n = self.t_dual.len();
        loop {
            let r: Vec<Vec<u32>> = (0..4).map(|_| (0..n).map(|_| rng.gen_range(0..f.p())).collect()).collect();
            if FMatrix::from_rows(n, &r).rank(f) < 4 {
                continue;
            }
            return r
                .iter()
                .map(|coef| {
                    let mut row = vec![0u32; 30];
                    for (c, y) in coef.iter().zip(&self.t_dual) {
                        f.axpy(&mut row, y, *c);
                    }
                    row
                })
                .collect();
        }
    }

    /// One draw: `(dim ker g, B_2)`; `B_2` is present when the kernel exceeds
    /// the generic `B_1`-multiples.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (usize, Option<EMatrix>) {
        let f = &self.field;
        let pi = self.random_quotient(rng);
        let ker = self.g_matrix(&pi).kernel_basis(f);
        if ker.len() <= GENERIC_KERNEL {
            return (ker.len(), None);
        }
        let mut cols = Vec::new();
        for _ in 0..2 {
            let mut v = vec![0u32; 30];
            for k in &ker {
                f.axpy(&mut v, k, rng.gen_range(0..f.p()));
            }
            cols.push(v);
        }
        let mut b2 = EMatrix::zero(f.clone(), vec![2, 2], vec![0, 0, 0]);
        for (k, c) in cols.iter().enumerate() {
            for r in 0..3 {
                b2.set(r, k, ExtElem::from_graded(2, &c[r * 10..r * 10 + 10]));
            }
        }
        (ker.len(), Some(b2))
    }
}

const RANK_V: usize = 5;

/// Pipeline stages in the order they are run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Grassmannian,
    QuickFilter,
    Betti,
    CheckAb,
    Homology,
    Ideal,
    Smoothness,
    Accepted,
}

/// The `(a_1, a_2)` class of a `B` that passed the quick filter: twist-4
/// generators of the first and second syzygy modules.
pub fn betti_class(table: &BettiTable) -> (usize, usize) {
    (table.get(2, 4), table.get(3, 4))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub master_seed: u64,
    pub kernel_dim: usize,
    pub b2: Option<EMatrixJson>,
    /// First failing stage, or `accepted`.
    pub stage: Stage,
    pub betti: Option<String>,
    pub a1_class: Option<(usize, usize)>,
    pub reason: Option<String>,
    pub micros: u64,
}

/// Options for the expensive tail of the pipeline.
#[derive(Clone, Debug)]
pub struct PipelineOptions {
    /// Run ideal extraction and smoothness (otherwise stop after the homology check).
    pub full: bool,
    pub smoothness_rows: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { full: true, smoothness_rows: Some(20_000_000) }
    }
}

/// What the pipeline produced for one `B`.
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub stage: Stage,
    pub reason: Option<String>,
    pub betti: Option<BettiTable>,
    pub monad: Option<Monad>,
    pub surface: Option<SurfaceIdeal>,
    pub smoothness: Option<Smoothness>,
}

/// Expected section dimensions `h⁰I_X(4+k)` for `k = 1, 2, 3`.
pub const SECTION_DIMS: [usize; 3] = [5, 29, 77];

/// `B → Betti table → A_B → check_AB → homology → ideal → smoothness`.
pub fn run_pipeline<R: Rng>(b: &EMatrix, rng: &mut R, opts: &PipelineOptions) -> Result<PipelineOutcome> {
    let mut out =
        PipelineOutcome { stage: Stage::QuickFilter, reason: None, betti: None, monad: None, surface: None, smoothness: None };
    if !quick_filter(b) {
        out.reason = Some(format!("flatten(B, -3) has rank {}", b.flatten(-3).rank(b.field())));
        return Ok(out);
    }
    let table = b.betti_window(3)?;
    out.betti = Some(table.clone());
    if !table.matches(&B_TABLE) {
        out.stage = Stage::Betti;
        let (a1, a2) = betti_class(&table);
        out.reason = Some(format!("Betti class a1 = {a1}, a2 = {a2}"));
        return Ok(out);
    }
    let monad = Monad::from_b(b.clone())?;
    let chk = check_ab(&monad.a);
    out.monad = Some(monad.clone());
    if !chk.ok {
        out.stage = Stage::CheckAb;
        out.reason = Some(format!("A_B syzygies: {} of twist 4, {} of twist 5", chk.twist4, chk.twist5));
        return Ok(out);
    }
    for (k, &want) in (1..=3).zip(&SECTION_DIMS) {
        let (_, _, h) = homology_dimensions(&monad, k)?;
        if h != want {
            out.stage = Stage::Homology;
            out.reason = Some(format!("homology at offset {k} has dimension {h}, expected {want}"));
            return Ok(out);
        }
    }
    if !opts.full {
        out.stage = Stage::Accepted;
        return Ok(out);
    }
    let surface = match ideal_of_surface(&monad, 7, rng) {
        Ok(s) => s,
        // the homology does not embed into O: not an ideal sheaf
        Err(Error::Dimension(why)) => {
            out.stage = Stage::Ideal;
            out.reason = Some(why);
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let hp = surface.ideal.hilbert_polynomial()?;
    let want = HilbertPolynomial::from_integers(&surface_hilbert_polynomial(DEGREE, SECTIONAL_GENUS, CHI));
    out.surface = Some(surface.clone());
    if hp != want {
        out.stage = Stage::Ideal;
        out.reason = Some(format!("Hilbert polynomial {hp}"));
        return Ok(out);
    }
    let verdict = surface.ideal.smoothness(2, rng, opts.smoothness_rows)?;
    out.smoothness = Some(verdict.clone());
    if verdict != Smoothness::Smooth {
        out.stage = Stage::Smoothness;
        out.reason = Some(format!("{verdict:?}"));
        return Ok(out);
    }
    out.stage = Stage::Accepted;
    Ok(out)
}

/// One Construction I trial with stream `index` of the master seed.
pub fn construct1_trial(sampler: &QuotientSampler, b1: &EMatrix, master: u64, index: u64, opts: &PipelineOptions) -> Result<(TrialRecord, PipelineOutcome)> {
    let start = std::time::Instant::now();
    let mut rng = trial_rng(master, index);
    let (kernel_dim, b2) = sampler.sample(&mut rng);
    let mut rec = TrialRecord {
        index,
        master_seed: master,
        kernel_dim,
        b2: None,
        stage: Stage::Grassmannian,
        betti: None,
        a1_class: None,
        reason: None,
        micros: 0,
    };
    let Some(b2) = b2 else {
        rec.reason = Some(format!("dim ker g = {kernel_dim}"));
        rec.micros = start.elapsed().as_micros() as u64;
        let empty = PipelineOutcome { stage: Stage::Grassmannian, reason: rec.reason.clone(), betti: None, monad: None, surface: None, smoothness: None };
        return Ok((rec, empty));
    };
    rec.b2 = Some(b2.to_json());
    let outcome = run_pipeline(&assemble_b(&b2, b1), &mut rng, opts)?;
    rec.stage = outcome.stage;
    rec.reason = outcome.reason.clone();
    rec.betti = outcome.betti.as_ref().map(|t| t.to_string());
    rec.a1_class = outcome.betti.as_ref().map(betti_class);
    rec.micros = start.elapsed().as_micros() as u64;
    Ok((rec, outcome))
}

/// A trial counts as a hit when `B` has the target table with `a_1 = 5`, `a_2 = 0`.
pub fn is_hit(rec: &TrialRecord) -> bool {
    rec.stage > Stage::Betti
}

/// Construction II for a linear `A_1`: draw `B_2'` from the solution space until
/// the pipeline accepts, at most `attempts` times.
pub fn construct2_pipeline<R: Rng>(
    a1: &EMatrix,
    b1: &EMatrix,
    rng: &mut R,
    attempts: usize,
    opts: &PipelineOptions,
) -> Result<(SolutionSpace, Vec<PipelineOutcome>)> {
    let space = SolutionSpace::new(a1, b1)?;
    let mut outcomes = Vec::new();
    for _ in 0..attempts {
        let b2 = sample_b2_from_solutions(&space, b1, rng)?;
        let o = run_pipeline(&assemble_b(&b2, b1), rng, opts)?;
        let done = o.stage == Stage::Accepted;
        outcomes.push(o);
        if done {
            break;
        }
    }
    Ok((space, outcomes))
}

/// An `A_1` whose first `copies` columns are rows of `B_1` (so the 2-planes
/// they span are shared with `B_1`), the remaining columns random.
///
/// Copying two rows verbatim also shares the pencil they span, so `Z_A ∩ Z_B`
/// contains a conic; with `twist` each copied pair is first moved by a random
/// `GL_2`, which keeps the planes but not the pencil.
pub fn a1_with_shared_planes<R: Rng>(b1: &EMatrix, copies: usize, twist: bool, rng: &mut R) -> EMatrix {
    let f = b1.field();
    let mut a1 = random_a1(f, rng);
    for c in 0..copies.min(3) {
        let (h, k) = (*b1.get(c, 0), *b1.get(c, 1));
        let (a, b, cc, d) = loop {
            let m: [u32; 4] = if twist { std::array::from_fn(|_| rng.gen_range(0..f.p())) } else { [1, 0, 0, 1] };
            if f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2])) != 0 {
                break (m[0], m[1], m[2], m[3]);
            }
        };
        a1.set(0, c, h.scale(a, f).add(&k.scale(b, f), f));
        a1.set(1, c, h.scale(cc, f).add(&k.scale(d, f), f));
    }
    a1
}

/// Draw `A_1` until `N(A_1) = target`, sharing `120 − target − 1` planes with
/// `B_1` (a random `A_1` has `N = 119` or `120`).
pub fn sample_a1_with_n<R: Rng>(b1: &EMatrix, target: usize, rng: &mut R, attempts: usize) -> Result<(EMatrix, SolutionSpace)> {
    let copies = 119usize.saturating_sub(target);
    for _ in 0..attempts {
        let a1 = a1_with_shared_planes(b1, copies, false, rng);
        let space = SolutionSpace::new(&a1, b1);
        if let Ok(space) = space {
            if space.n == target {
                return Ok((a1, space));
            }
        }
    }
    Err(Error::Budget(format!("no A_1 with N = {target} in {attempts} draws")))
}

/// The complex of the negative controls: `A = S·C` with `S` the twist-3
/// syzygies of `B` and `C` a random constant `k×4` matrix.
pub fn random_complex_from_syzygies<R: Rng>(b: &EMatrix, rng: &mut R) -> Result<Monad> {
    let f = b.field();
    let syz = b.syzygy_matrix();
    let cols: Vec<usize> = (0..syz.cols()).filter(|&c| syz.source().twists[c] == 3).collect();
    let s = syz.select_columns(&cols);
    let mut c = EMatrix::zero(f.clone(), A_SOURCE.to_vec(), vec![3; cols.len()]);
    for r in 0..cols.len() {
        for j in 0..4 {
            c.set(r, j, ExtElem::monomial(crate::extalg::ExtMonomial::ONE, rng.gen_range(0..f.p())));
        }
    }
    Monad::new(b.clone(), s.compose(&c)?)
}

/// Betti table of `B` observed for `N(A_1) = 119`.
pub const TABLE_N119: [(usize, i32, usize); 6] = [(0, 0, 3), (1, 1, 2), (1, 2, 2), (2, 3, 6), (2, 4, 5), (3, 4, 10)];
/// Betti table of `B` observed for `N(A_1) = 118`.
pub const TABLE_N118: [(usize, i32, usize); 6] = [(0, 0, 3), (1, 1, 2), (1, 2, 2), (2, 3, 5), (2, 4, 3), (3, 4, 3)];

/// A Construction II sample with `N < 120` pushed through the monad checks.
#[derive(Clone, Debug)]
pub struct NegativeControl {
    pub n: usize,
    pub betti: BettiTable,
    /// Draws needed until the Betti table had the expected shape.
    pub draws: usize,
    pub ab_ok: bool,
    pub ab_twist4: usize,
    pub ab_twist5: usize,
    /// Homology dimensions at offsets 1, 2, 3.
    pub homology: [usize; 3],
    /// First failing stage (`Accepted` if nothing failed).
    pub rejected_at: Stage,
    pub reason: String,
}

/// Negative control for `target ∈ {118, 119}`: draw `A_1`, `B_2'` until `B`
/// has the expected table, then compose a random `4E(3) → kE(3)` map with the
/// twist-3 syzygies of `B` and run the checks of the pipeline on the result.
pub fn negative_control<R: Rng>(b1: &EMatrix, target: usize, rng: &mut R, attempts: usize) -> Result<NegativeControl> {
    let expected: &[(usize, i32, usize)] = match target {
        119 => &TABLE_N119,
        118 => &TABLE_N118,
        _ => return Err(Error::Dimension(format!("no reference table for N = {target}"))),
    };
    for draw in 1..=attempts {
        let (_, space) = sample_a1_with_n(b1, target, rng, 50)?;
        let b = assemble_b(&sample_b2_from_solutions(&space, b1, rng)?, b1);
        let betti = b.betti_window(3)?;
        if !betti.matches(expected) {
            continue;
        }
        let m = random_complex_from_syzygies(&b, rng)?;
        let chk = check_ab(&m.a);
        let mut homology = [0; 3];
        for k in 1..=3 {
            homology[k - 1] = homology_dimensions(&m, k as u32)?.2;
        }
        let (rejected_at, reason) = if !chk.ok {
            (Stage::CheckAb, format!("A syzygies: {} of twist 4, {} of twist 5", chk.twist4, chk.twist5))
        } else if homology != SECTION_DIMS {
            (Stage::Homology, format!("homology dimensions {homology:?}"))
        } else {
            match ideal_of_surface(&m, 7, rng) {
                Err(e) => (Stage::Ideal, e.to_string()),
                Ok(s) => {
                    let hp = s.ideal.hilbert_polynomial()?;
                    let want = HilbertPolynomial::from_integers(&surface_hilbert_polynomial(DEGREE, SECTIONAL_GENUS, CHI));
                    if hp != want {
                        (Stage::Ideal, format!("Hilbert polynomial {hp}"))
                    } else {
                        (Stage::Accepted, String::new())
                    }
                }
            }
        };
        return Ok(NegativeControl {
            n: space.n,
            betti,
            draws: draw,
            ab_ok: chk.ok,
            ab_twist4: chk.twist4,
            ab_twist5: chk.twist5,
            homology,
            rejected_at,
            reason,
        });
    }
    Err(Error::Budget(format!("no B with the N = {target} table in {attempts} draws")))
}

/// `dim ker g` for a uniformly random quotient — 12 for the quotients
/// admitting a `B_2` outside the `B_1`-multiples.
pub fn kernel_g_dimension<R: Rng>(sampler: &QuotientSampler, rng: &mut R) -> usize {
    let pi = sampler.random_quotient(rng);
    sampler.g_matrix(&pi).kernel_basis(&sampler.field).len()
}

/// Dimension bookkeeping of the deformation computation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModuliReport {
    pub kernel_dim: usize,
    pub group_dim: usize,
    /// Rank of the infinitesimal group action (expected `group_dim − 1`).
    pub orbit_dim: usize,
    pub tangent_dim: usize,
    /// `tangent − 18`.
    pub moduli_dim: usize,
}

/// Coordinates on pairs `(A', B')`: first `A'` (entries `(r, c)` row-major,
/// each in its own graded piece), then `B'`.
fn pair_coords(m: &Monad, a: &EMatrix, b: &EMatrix) -> Vec<u32> {
    let mut v = Vec::with_capacity(210);
    for (mat, src, tgt) in [(a, &A_SOURCE[..], &B_SOURCE[..]), (b, &B_SOURCE[..], &B_TARGET[..])] {
        for (r, &bt) in tgt.iter().enumerate() {
            for (c, &at) in src.iter().enumerate() {
                v.extend(mat.get(r, c).graded_coeffs((at - bt) as usize));
            }
        }
    }
    let _ = m;
    v
}

fn pair_from_coords(f: &PrimeField, v: &[u32]) -> (EMatrix, EMatrix) {
    let mut a = EMatrix::zero(f.clone(), A_SOURCE.to_vec(), B_SOURCE.to_vec());
    let mut b = EMatrix::zero(f.clone(), B_SOURCE.to_vec(), B_TARGET.to_vec());
    let mut pos = 0;
    for (mat, src, tgt) in [(&mut a, &A_SOURCE[..], &B_SOURCE[..]), (&mut b, &B_SOURCE[..], &B_TARGET[..])] {
        for (r, &bt) in tgt.iter().enumerate() {
            for (c, &at) in src.iter().enumerate() {
                let k = (at - bt) as usize;
                let n = binomial(5, k);
                mat.set(r, c, ExtElem::from_graded(k, &v[pos..pos + n]));
                pos += n;
            }
        }
    }
    (a, b)
}

fn composite_coords(p: &EMatrix) -> Vec<u32> {
    let mut v = Vec::with_capacity(EQUATIONS);
    for r in 0..3 {
        for c in 0..4 {
            v.extend(p.get(r, c).graded_coeffs(3));
        }
    }
    v
}

/// The 120×210 differential `(A', B') ↦ B∘A' + B'∘A` at a monad.
pub fn tangent_matrix(m: &Monad) -> FMatrix {
    let f = m.field();
    let n = 210;
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0u32; n];
        e[i] = 1;
        let (a, b) = pair_from_coords(f, &e);
        let img = m.b.compose(&a).unwrap().add(&b.compose(&m.a).unwrap()).unwrap();
        cols.push(composite_coords(&img));
    }
    FMatrix::from_columns(EQUATIONS, &cols)
}

/// Tangent directions of the group orbit: `(hA − Ag, cB − Bh)` for `g ∈ gl_4`,
/// `h` in the Lie algebra of `Aut(2E(2)⊕2E(1))`, `c ∈ gl_3`.
pub fn orbit_directions(m: &Monad) -> Vec<Vec<u32>> {
    let f = m.field();
    let mut dirs = Vec::new();
    let unit = |src: &[i32], tgt: &[i32], r: usize, c: usize, e: ExtElem| {
        let mut x = EMatrix::zero(f.clone(), src.to_vec(), tgt.to_vec());
        x.set(r, c, e);
        x
    };
    let one = ExtElem::monomial(crate::extalg::ExtMonomial::ONE, 1);
    let zero_b = EMatrix::zero(f.clone(), B_SOURCE.to_vec(), B_TARGET.to_vec());
    let zero_a = EMatrix::zero(f.clone(), A_SOURCE.to_vec(), B_SOURCE.to_vec());
    // g ∈ gl_4: (−A g, 0)
    for r in 0..4 {
        for c in 0..4 {
            let g = unit(&A_SOURCE, &A_SOURCE, r, c, one);
            dirs.push(pair_coords(m, &m.a.compose(&g).unwrap().scale(f.neg(1)), &zero_b));
        }
    }
    // h: constant blocks on E(2) and E(1), linear block E(2) → E(1)
    let mut hs = Vec::new();
    for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
        hs.push(unit(&B_SOURCE, &B_SOURCE, r, c, one));
    }
    for r in 2..4 {
        for c in 0..2 {
            for v in 0..5 {
                hs.push(unit(&B_SOURCE, &B_SOURCE, r, c, ExtElem::generator(v)));
            }
        }
    }
    for h in hs {
        let a = h.compose(&m.a).unwrap();
        let b = m.b.compose(&h).unwrap().scale(f.neg(1));
        dirs.push(pair_coords(m, &a, &b));
    }
    // c ∈ gl_3: (0, c B)
    for r in 0..3 {
        for c in 0..3 {
            let cc = unit(&B_TARGET, &B_TARGET, r, c, one);
            dirs.push(pair_coords(m, &zero_a, &cc.compose(&m.b).unwrap()));
        }
    }
    dirs
}

/// `dim ker dφ`, the orbit dimension and the derived tangent/moduli dimensions.
pub fn tangent_dimension(m: &Monad) -> Result<ModuliReport> {
    let f = m.field();
    let d = tangent_matrix(m);
    let kernel_dim = d.cols() - d.rank(f);
    let dirs = orbit_directions(m);
    debug_assert_eq!(dirs.len(), GROUP_DIM);
    for v in &dirs {
        if d.mul_vec(v, f).iter().any(|&x| x != 0) {
            return Err(Error::NotComplex("a group direction leaves the kernel of dφ".into()));
        }
    }
    let orbit_dim = FMatrix::from_rows(210, &dirs).rank(f);
    let tangent_dim = kernel_dim - (GROUP_DIM - 1);
    Ok(ModuliReport { kernel_dim, group_dim: GROUP_DIM, orbit_dim, tangent_dim, moduli_dim: tangent_dim.saturating_sub(18) })
}

/// Family dimension `N − 99` and codimension `120 − N` of Construction II.
pub fn family_dimensions(n: usize) -> (i64, i64) {
    (n as i64 - 99, 120 - n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn zero_b2_fails_quick_filter_with_rank_20() {
        let b1 = fixtures::b1_f5();
        let f = b1.field().clone();
        let b = assemble_b(&EMatrix::zero(f.clone(), vec![2, 2], vec![0, 0, 0]), &b1);
        assert_eq!(b.flatten(-3).rank(&f), 20);
        assert!(!quick_filter(&b));
    }

    #[test]
    fn u_b1_is_twenty_dimensional_and_solves_the_system() {
        let b1 = fixtures::b1_f5();
        assert_eq!(u_b1_space(&b1).rank(), 20);
    }

    #[test]
    fn trial_rng_is_replayable() {
        let a: u64 = trial_rng(42, 7).gen();
        let b: u64 = trial_rng(42, 7).gen();
        let c: u64 = trial_rng(42, 8).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    fn construct2_monad(seed: u64) -> Monad {
        let b1 = fixtures::b1_f5();
        let a1 = fixtures::load(fixtures::A1_I_F5);
        let space = SolutionSpace::new(&a1, &b1).unwrap();
        let b2 = sample_b2_from_solutions(&space, &b1, &mut trial_rng(seed, 0)).unwrap();
        Monad::from_b(assemble_b(&b2, &b1)).unwrap()
    }

    #[test]
    fn tangent_space_has_dimension_38() {
        let r = tangent_dimension(&construct2_monad(3)).unwrap();
        assert_eq!(r, ModuliReport { kernel_dim: 90, group_dim: 53, orbit_dim: 52, tangent_dim: 38, moduli_dim: 20 });
    }

    #[test]
    fn family_dimension_formulas() {
        assert_eq!(family_dimensions(114), (15, 6));
        assert_eq!(family_dimensions(117), (18, 3));
    }

    #[test]
    fn quotient_space_is_ten_dimensional() {
        let b1 = fixtures::b1_f5();
        let s = QuotientSampler::new(&b1);
        assert_eq!(s.quotient_dim(), 10);
        // B_1-multiples always lie in ker g
        let mut rng = trial_rng(1, 1);
        for _ in 0..20 {
            assert!(kernel_g_dimension(&s, &mut rng) >= GENERIC_KERNEL);
        }
    }

    #[test]
    fn sampled_b2_dies_in_the_quotient() {
        let b1 = fixtures::b1_f5();
        let s = QuotientSampler::new(&b1);
        let opts = PipelineOptions { full: false, ..Default::default() };
        let mut passed = 0;
        for i in 0..300 {
            let (rec, out) = construct1_trial(&s, &b1, 5, i, &opts).unwrap();
            if rec.kernel_dim > GENERIC_KERNEL {
                // rank of v ↦ B_2 ∧ v in T is at most 6, so flatten(B, −3) has rank ≤ 26
                if out.stage > Stage::QuickFilter {
                    passed += 1;
                }
            } else {
                assert_eq!(rec.stage, Stage::Grassmannian);
            }
        }
        assert!(passed > 0);
    }

    #[test]
    fn trial_records_replay_byte_identically() {
        let b1 = fixtures::b1_f5();
        let s = QuotientSampler::new(&b1);
        let opts = PipelineOptions { full: false, ..Default::default() };
        for i in 0..40 {
            let (mut a, _) = construct1_trial(&s, &b1, 9, i, &opts).unwrap();
            let (mut b, _) = construct1_trial(&s, &b1, 9, i, &opts).unwrap();
            a.micros = 0;
            b.micros = 0;
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }

    #[test]
    fn negative_control_119_has_wrong_homology() {
        let b1 = fixtures::b1_f5();
        let nc = negative_control(&b1, 119, &mut trial_rng(7, 0), 20).unwrap();
        assert_eq!(nc.n, 119);
        assert!(nc.betti.matches(&TABLE_N119));
        assert_ne!(nc.homology, SECTION_DIMS);
        assert_ne!(nc.rejected_at, Stage::Accepted);
    }

    #[test]
    fn negative_control_118_is_not_an_ideal_sheaf() {
        let b1 = fixtures::b1_f5();
        let nc = negative_control(&b1, 118, &mut trial_rng(7, 1), 20).unwrap();
        assert_eq!(nc.n, 118);
        assert!(nc.betti.matches(&TABLE_N118));
        assert_eq!(nc.rejected_at, Stage::Ideal, "{nc:?}");
    }

    #[test]
    fn group_directions_lie_in_the_kernel() {
        let m = construct2_monad(3);
        let d = tangent_matrix(&m);
        let f = m.field();
        for v in orbit_directions(&m) {
            assert!(d.mul_vec(&v, f).iter().all(|&x| x == 0));
        }
    }
}
