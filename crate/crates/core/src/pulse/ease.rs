//! Sequential null-space design of parallel amplitude-modulated gates.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::code::CodeLayout;
use crate::ionphys::{segment_displacement_dmu, ModeData, PulseSequence, SegmentKernel};
use crate::{Error, Result};

/// Requested two-qubit phases; every unlisted pair of addressed ions targets zero.
#[derive(Clone, Debug, PartialEq)]
pub struct GateTargets {
    pairs: Vec<(usize, usize, f64)>,
}

impl GateTargets {
    /// Arbitrary target graph (components may be larger than a pair).
    pub fn new(pairs: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashMap::new();
        for &(i, j, theta) in &pairs {
            if i == j {
                return Err(Error::invalid(format!("self-pair on ion {i}")));
            }
            if !theta.is_finite() || theta == 0.0 {
                return Err(Error::invalid(format!(
                    "target phase for ({i}, {j}) must be finite and nonzero"
                )));
            }
            if seen.insert((i.min(j), i.max(j)), theta).is_some() {
                return Err(Error::invalid(format!("pair ({i}, {j}) listed twice")));
            }
        }
        Ok(GateTargets { pairs })
    }

    /// Disjoint pairwise gates at `theta = +-pi/4`.
    pub fn pairwise(pairs: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut used = std::collections::HashSet::new();
        for &(i, j, theta) in &pairs {
            if (theta.abs() - FRAC_PI_4).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "pairwise target ({i}, {j}) must be +-pi/4, got {theta}"
                )));
            }
            if !used.insert(i) || !used.insert(j) {
                return Err(Error::invalid(format!(
                    "ion reused in parallel pair ({i}, {j})"
                )));
            }
        }
        Self::new(pairs)
    }

    /// All gates of one CNOT layer, `theta = pi/4`, ions numbered by code qubit.
    pub fn from_layer(layout: &CodeLayout, layer: usize) -> Result<Self> {
        let pairs = layout
            .cnot_layer(layer)
            .iter()
            .map(|g| (g.control, g.target, FRAC_PI_4))
            .collect();
        Self::pairwise(pairs)
    }

    pub fn pairs(&self) -> &[(usize, usize, f64)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Addressed ions in order of first appearance.
    pub fn ions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &(i, j, _) in &self.pairs {
            for q in [i, j] {
                if !out.contains(&q) {
                    out.push(q);
                }
            }
        }
        out
    }

    /// Target phase between two ions (zero when unlisted).
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.pairs
            .iter()
            .find(|&&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i))
            .map_or(0.0, |p| p.2)
    }

    /// Dense target matrix over `ions`.
    pub fn matrix(&self, ions: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(ions.len(), ions.len(), |a, b| {
            if a == b {
                0.0
            } else {
                self.theta(ions[a], ions[b])
            }
        })
    }

    /// Connected components, each ordered so its first two ions share a target.
    fn components(&self) -> Vec<Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(i, j, _) in &self.pairs {
            adj.entry(i).or_default().push(j);
            adj.entry(j).or_default().push(i);
        }
        let mut done = std::collections::HashSet::new();
        let mut out = Vec::new();
        for &(i, j, _) in &self.pairs {
            if done.contains(&i) {
                continue;
            }
            let mut order = vec![i, j];
            done.insert(i);
            done.insert(j);
            let mut queue: VecDeque<usize> = order.iter().copied().collect();
            while let Some(q) = queue.pop_front() {
                for &n in &adj[&q] {
                    if done.insert(n) {
                        order.push(n);
                        queue.push_back(n);
                    }
                }
            }
            out.push(order);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EaseOptions {
    /// Relative singular-value cutoff for null spaces and min-norm solves.
    pub null_tolerance: f64,
    /// Allowed drift of already satisfied constraints (relative to the target scale).
    pub check_tolerance: f64,
    /// Largest permitted Rabi amplitude (rad/s).
    pub max_amplitude: Option<f64>,
    /// Also cancel the first-order change of every displacement under a
    /// detuning shift (doubles the linear constraints).
    pub robust_detuning: bool,
}

impl Default for EaseOptions {
    fn default() -> Self {
        EaseOptions {
            null_tolerance: 1e-10,
            check_tolerance: 1e-8,
            max_amplitude: None,
            robust_detuning: false,
        }
    }
}

/// A designed pulse with its independently re-evaluated residuals.
#[derive(Clone, Debug)]
pub struct PulseDesign {
    pub pulse: PulseSequence,
    /// Dimension of the common displacement-free subspace.
    pub null_dim: usize,
    /// `max |alpha| / (max|Omega| * h)`.
    pub alpha_residual: f64,
    /// Largest `|Theta - theta|` over all addressed pairs.
    pub theta_residual: f64,
    pub max_rabi: f64,
    pub mean_rabi: f64,
}

impl PulseDesign {
    fn evaluate(
        pulse: PulseSequence,
        kernel: &SegmentKernel,
        modes: &ModeData,
        targets: &GateTargets,
        null_dim: usize,
    ) -> Self {
        let (alpha_residual, theta_residual) = design_residuals(&pulse, kernel, modes, targets);
        let (max_rabi, mean_rabi) = rabi_stats(&pulse);
        PulseDesign {
            pulse,
            null_dim,
            alpha_residual,
            theta_residual,
            max_rabi,
            mean_rabi,
        }
    }
}

/// Residuals of `pulse` against `targets`, computed from the closed-form integrals.
pub fn design_residuals(
    pulse: &PulseSequence,
    kernel: &SegmentKernel,
    modes: &ModeData,
    targets: &GateTargets,
) -> (f64, f64) {
    let alpha = kernel.alpha(modes, &pulse.ions, &pulse.amplitudes);
    let theta = kernel.theta(modes, &pulse.ions, &pulse.amplitudes);
    let scale = pulse.max_amplitude() * pulse.segment_duration();
    let amax = alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let alpha_res = if scale > 0.0 { amax / scale } else { 0.0 };
    let want = targets.matrix(&pulse.ions);
    let theta_res = (theta - want).iter().map(|x| x.abs()).fold(0.0, f64::max);
    (alpha_res, theta_res)
}

/// Peak and mean `|Omega|` over addressed ions and segments.
pub fn rabi_stats(pulse: &PulseSequence) -> (f64, f64) {
    let n: usize = pulse.amplitudes.iter().map(Vec::len).sum();
    if n == 0 {
        return (0.0, 0.0);
    }
    let sum: f64 = pulse.amplitudes.iter().flatten().map(|x| x.abs()).sum();
    (pulse.max_amplitude(), sum / n as f64)
}

/// Midway between the two highest transverse mode frequencies.
pub fn default_detuning(modes: &ModeData) -> f64 {
    match modes.omega.len() {
        0 => 0.0,
        1 => modes.omega[0],
        _ => 0.5 * (modes.omega[0] + modes.omega[1]),
    }
}

/// Orthonormal basis (columns) of the right null space of `m`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 || m.iter().all(|&x| x == 0.0) {
        return DMatrix::identity(n, n);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax)
        .collect();
    let rank = keep.len();
    if rank >= n {
        return DMatrix::zeros(n, 0);
    }
    let row_space = DMatrix::from_fn(n, rank, |r, c| v_t[(keep[c], r)]);
    // complete the row-space basis with a full Householder Q
    let qr = row_space.qr();
    let mut q_t = DMatrix::identity(n, n);
    qr.q_tr_mul(&mut q_t);
    q_t.rows(rank, n - rank).transpose()
}

/// Real displacement constraint rows: `Re F_k`, `Im F_k` for every mode.
pub fn displacement_constraints(kernel: &SegmentKernel) -> DMatrix<f64> {
    let (nk, ns) = (kernel.num_modes(), kernel.n_seg);
    let mut a = DMatrix::zeros(2 * nk, ns);
    for k in 0..nk {
        for (s, f) in kernel.f(k).iter().enumerate() {
            a[(2 * k, s)] = f.re;
            a[(2 * k + 1, s)] = f.im;
        }
    }
    a
}

/// Displacement constraints, plus their detuning derivatives when requested.
fn linear_constraints(kernel: &SegmentKernel, robust: bool) -> DMatrix<f64> {
    let a = displacement_constraints(kernel);
    if !robust {
        return a;
    }
    let (nk, ns) = (kernel.num_modes(), kernel.n_seg);
    let h = kernel.tau / ns as f64;
    let mut out = DMatrix::zeros(4 * nk, ns);
    out.rows_mut(0, 2 * nk).copy_from(&a);
    for (k, &w) in kernel.omega.iter().enumerate() {
        for s in 0..ns {
            let g = segment_displacement_dmu(kernel.mu, w, s as f64 * h, h);
            // derivative rows are O(tau) larger; bring them to the same scale
            out[(2 * nk + 2 * k, s)] = g.re / kernel.tau;
            out[(2 * nk + 2 * k + 1, s)] = g.im / kernel.tau;
        }
    }
    out
}

/// `M_ij v = sum_k eta_k^2 b_ik b_jk S_k v`.
fn apply_coupling(
    kernel: &SegmentKernel,
    modes: &ModeData,
    i: usize,
    j: usize,
    v: &[f64],
) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for k in 0..kernel.num_modes() {
        let c = modes.eta[k] * modes.eta[k] * modes.b[(i, k)] * modes.b[(j, k)];
        if c != 0.0 {
            kernel.apply_phase(k, v, c, &mut out);
        }
    }
    out
}

/// Per-mode images `S_k Omega` of a solved ion, rows = modes.
fn mode_images(kernel: &SegmentKernel, amp: &[f64]) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(kernel.num_modes(), kernel.n_seg);
    let mut buf = vec![0.0; kernel.n_seg];
    for k in 0..kernel.num_modes() {
        buf.fill(0.0);
        kernel.apply_phase(k, amp, 1.0, &mut buf);
        z.row_mut(k).copy_from_slice(&buf);
    }
    z
}

struct Solved {
    ion: usize,
    amp: DVector<f64>,
    images: DMatrix<f64>,
}

struct Designer<'a> {
    kernel: &'a SegmentKernel,
    modes: &'a ModeData,
    targets: &'a GateTargets,
    options: &'a EaseOptions,
    basis: DMatrix<f64>,
    solved: Vec<Solved>,
}

impl Designer<'_> {
    fn weights(&self, i: usize, j: usize) -> DVector<f64> {
        let m = self.modes;
        DVector::from_fn(m.num_modes(), |k, _| {
            m.eta[k] * m.eta[k] * m.b[(i, k)] * m.b[(j, k)]
        })
    }

    /// Phase constraints of `ion` against every solved ion, in reduced coordinates.
    fn constraint_rows(&self, ion: usize) -> DMatrix<f64> {
        let r = self.basis.ncols();
        let mut rows = DMatrix::zeros(self.solved.len(), r);
        for (row, s) in self.solved.iter().enumerate() {
            let w = s.images.tr_mul(&self.weights(s.ion, ion));
            rows.row_mut(row).copy_from(&w.tr_mul(&self.basis));
        }
        rows
    }

    fn exhausted(&self, ion: usize, detail: impl Into<String>) -> Error {
        Error::NullSpaceExhausted {
            ion,
            detail: detail.into(),
        }
    }

    fn solve_pair(&mut self, a: usize, b: usize, theta: f64) -> Result<()> {
        let tol = self.options.null_tolerance;
        let ea = null_space(&self.constraint_rows(a), tol);
        let eb = null_space(&self.constraint_rows(b), tol);
        if ea.ncols() == 0 {
            return Err(self.exhausted(a, "no freedom left after earlier phase constraints"));
        }
        if eb.ncols() == 0 {
            return Err(self.exhausted(b, "no freedom left after earlier phase constraints"));
        }
        let left = &self.basis * ea;
        let right = &self.basis * eb;
        let mut m_right = DMatrix::zeros(right.nrows(), right.ncols());
        for c in 0..right.ncols() {
            let col: Vec<f64> = right.column(c).iter().copied().collect();
            let img = apply_coupling(self.kernel, self.modes, a, b, &col);
            m_right.column_mut(c).copy_from_slice(&img);
        }
        let reduced = left.tr_mul(&m_right);
        let svd = reduced.svd(true, true);
        let sigma = svd.singular_values[0];
        if !(sigma > 0.0) {
            return Err(Error::InfeasibleTarget(format!(
                "ions {a} and {b} cannot be entangled in the remaining subspace"
            )));
        }
        let u = svd.u.as_ref().expect("requested U").column(0).clone_owned();
        let v = svd.v_t.as_ref().expect("requested V").row(0).transpose();
        let s = (theta.abs() / sigma).sqrt();
        let amp_a = &left * u * s;
        let amp_b = &right * v * (s * theta.signum());
        self.check_cap(a, &amp_a)?;
        self.check_cap(b, &amp_b)?;
        self.push(a, amp_a)?;
        self.push(b, amp_b)
    }

    fn solve_min_norm(&mut self, ion: usize) -> Result<()> {
        let rows = self.constraint_rows(ion);
        if rows.nrows() >= self.basis.ncols() {
            return Err(self.exhausted(ion, "more phase constraints than free directions"));
        }
        let rhs = DVector::from_iterator(
            rows.nrows(),
            self.solved.iter().map(|s| self.targets.theta(s.ion, ion)),
        );
        let svd = rows.clone().svd(true, true);
        let eps = self.options.null_tolerance * svd.singular_values.max();
        let x = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::invalid(e.to_string()))?;
        let resid = (&rows * &x - &rhs).amax();
        if resid > self.options.check_tolerance * rhs.amax().max(FRAC_PI_4) {
            return Err(self.exhausted(
                ion,
                format!("phase constraints inconsistent (residual {resid:e})"),
            ));
        }
        let amp = &self.basis * x;
        self.check_cap(ion, &amp)?;
        self.push(ion, amp)
    }

    fn check_cap(&self, ion: usize, amp: &DVector<f64>) -> Result<()> {
        if let Some(cap) = self.options.max_amplitude {
            let peak = amp.amax();
            if peak > cap {
                return Err(Error::InfeasibleTarget(format!(
                    "ion {ion} needs amplitude {peak:e} above cap {cap:e}"
                )));
            }
        }
        Ok(())
    }

    /// Record a solved ion after re-checking its phases against all earlier ions.
    fn push(&mut self, ion: usize, amp: DVector<f64>) -> Result<()> {
        let images = mode_images(self.kernel, amp.as_slice());
        for s in &self.solved {
            let got = s.amp.dot(&images.tr_mul(&self.weights(s.ion, ion)));
            let want = self.targets.theta(s.ion, ion);
            if (got - want).abs() > self.options.check_tolerance * FRAC_PI_4 {
                return Err(self.exhausted(
                    ion,
                    format!(
                        "phase with ion {} drifted to {got:e} (target {want:e})",
                        s.ion
                    ),
                ));
            }
        }
        self.solved.push(Solved { ion, amp, images });
        Ok(())
    }
}

/// Design amplitudes realising `targets` with every displacement closed and
/// every untargeted phase cancelled.
pub fn ease_design(
    modes: &ModeData,
    targets: &GateTargets,
    mu: f64,
    tau: f64,
    n_seg: usize,
    options: &EaseOptions,
) -> Result<PulseDesign> {
    for ion in targets.ions() {
        if ion >= modes.b.nrows() {
            return Err(Error::UnknownQubit(ion));
        }
    }
    let kernel = SegmentKernel::new(&modes.omega, mu, tau, n_seg)?;
    let basis = null_space(
        &linear_constraints(&kernel, options.robust_detuning),
        options.null_tolerance,
    );
    let null_dim = basis.ncols();
    if targets.is_empty() {
        let pulse = PulseSequence::new(n_seg, tau, mu, Vec::new(), Vec::new())?;
        return Ok(PulseDesign::evaluate(
            pulse, &kernel, modes, targets, null_dim,
        ));
    }
    if null_dim == 0 {
        return Err(Error::NullSpaceExhausted {
            ion: targets.ions()[0],
            detail: format!("displacement constraints leave no freedom with {n_seg} segments"),
        });
    }
    let mut designer = Designer {
        kernel: &kernel,
        modes,
        targets,
        options,
        basis,
        solved: Vec::new(),
    };
    for comp in targets.components() {
        let theta = targets.theta(comp[0], comp[1]);
        designer.solve_pair(comp[0], comp[1], theta)?;
        for &ion in &comp[2..] {
            designer.solve_min_norm(ion)?;
        }
    }
    let ions = designer.solved.iter().map(|s| s.ion).collect();
    let amplitudes = designer
        .solved
        .iter()
        .map(|s| s.amp.as_slice().to_vec())
        .collect();
    let pulse = PulseSequence::new(n_seg, tau, mu, ions, amplitudes)?;
    Ok(PulseDesign::evaluate(
        pulse, &kernel, modes, targets, null_dim,
    ))
}

/// EASE applied to every gate of one CNOT layer (ion index = code qubit).
pub fn design_parallel_layer(
    modes: &ModeData,
    layout: &CodeLayout,
    layer: usize,
    mu: f64,
    tau: f64,
    n_seg: usize,
    options: &EaseOptions,
) -> Result<PulseDesign> {
    if modes.b.nrows() != layout.num_qubits() {
        return Err(Error::invalid(format!(
            "crystal has {} ions but the code has {} qubits",
            modes.b.nrows(),
            layout.num_qubits()
        )));
    }
    let targets = GateTargets::from_layer(layout, layer)?;
    ease_design(modes, &targets, mu, tau, n_seg, options)
}

/// Equal-amplitude pulse for one pair: the displacement-free shape with the
/// largest pair phase, scaled to hit `|theta|` exactly. When that phase has
/// the wrong sign the second ion is driven with the inverted shape. The
/// other ions of the crystal are left unconstrained.
pub fn design_single_pair(
    modes: &ModeData,
    pair: (usize, usize),
    theta: f64,
    mu: f64,
    tau: f64,
    n_seg: usize,
    options: &EaseOptions,
) -> Result<PulseDesign> {
    let (i, j) = pair;
    let targets = GateTargets::new(vec![(i, j, theta)])?;
    for q in [i, j] {
        if q >= modes.b.nrows() {
            return Err(Error::UnknownQubit(q));
        }
    }
    let kernel = SegmentKernel::new(&modes.omega, mu, tau, n_seg)?;
    let basis = null_space(
        &linear_constraints(&kernel, options.robust_detuning),
        options.null_tolerance,
    );
    let null_dim = basis.ncols();
    if null_dim == 0 {
        return Err(Error::NullSpaceExhausted {
            ion: i,
            detail: format!("displacement constraints leave no freedom with {n_seg} segments"),
        });
    }
    let mut m_basis = DMatrix::zeros(n_seg, null_dim);
    for c in 0..null_dim {
        let col: Vec<f64> = basis.column(c).iter().copied().collect();
        m_basis
            .column_mut(c)
            .copy_from_slice(&apply_coupling(&kernel, modes, i, j, &col));
    }
    let reduced = basis.tr_mul(&m_basis);
    let sym = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let best = (0..null_dim)
        .max_by(|&a, &b| {
            eig.eigenvalues[a]
                .abs()
                .total_cmp(&eig.eigenvalues[b].abs())
        })
        .expect("nonempty null space");
    let lambda = eig.eigenvalues[best];
    if lambda == 0.0 {
        return Err(Error::InfeasibleTarget(format!(
            "ions {i} and {j} are uncoupled in the displacement-free subspace"
        )));
    }
    let mut x = eig.eigenvectors.column(best).clone_owned();
    // fixed sign for reproducibility
    if x[x.iamax()] < 0.0 {
        x.neg_mut();
    }
    let amp = &basis * x * (theta.abs() / lambda.abs()).sqrt();
    if let Some(cap) = options.max_amplitude {
        if amp.amax() > cap {
            return Err(Error::InfeasibleTarget(format!(
                "pair needs amplitude {:e} above cap {cap:e}",
                amp.amax()
            )));
        }
    }
    let shape = amp.as_slice().to_vec();
    // opposite phase sign: drive the second ion with the inverted shape
    let second = if lambda * theta > 0.0 {
        shape.clone()
    } else {
        shape.iter().map(|x| -x).collect()
    };
    let pulse = PulseSequence::new(n_seg, tau, mu, vec![i, j], vec![shape, second])?;
    Ok(PulseDesign::evaluate(
        pulse, &kernel, modes, &targets, null_dim,
    ))
}

/// Scale factors `|s_p| = sqrt(|theta| / |Theta_p|)` putting every pair driven
/// by the shared `shape` exactly on `theta`. A negative factor means the pair's
/// phase has the wrong sign and its second ion gets the inverted shape.
pub fn rescale_for_boundary(
    shape: &[f64],
    pairs: &[(usize, usize)],
    modes: &ModeData,
    kernel: &SegmentKernel,
    theta: f64,
) -> Result<Vec<f64>> {
    if shape.len() != kernel.n_seg {
        return Err(Error::invalid(
            "pulse shape length differs from the segment count",
        ));
    }
    // uᵀ S_k u once per mode; pair phases are then weighted sums
    let images = mode_images(kernel, shape);
    let u = DVector::from_column_slice(shape);
    let quad = &images * u;
    let floor = 1e-9 * theta.abs();
    pairs
        .iter()
        .map(|&(i, j)| {
            let mut phase = 0.0;
            for k in 0..modes.num_modes() {
                phase += modes.eta[k] * modes.eta[k] * modes.b[(i, k)] * modes.b[(j, k)] * quad[k];
            }
            if phase.abs() < floor {
                return Err(Error::InfeasibleTarget(format!(
                    "pair ({i}, {j}) is effectively uncoupled (phase {phase:e})"
                )));
            }
            let s = (theta.abs() / phase.abs()).sqrt();
            Ok(if phase * theta < 0.0 { -s } else { s })
        })
        .collect()
}

/// Shared pulse applied to many pairs: the first ion of each pair gets
/// `|s| * shape`, the second `s * shape`.
pub fn transplant(
    shape: &[f64],
    pairs: &[(usize, usize)],
    scales: &[f64],
    mu: f64,
    tau: f64,
) -> Result<PulseSequence> {
    if scales.len() != pairs.len() {
        return Err(Error::invalid("one scale factor per pair required"));
    }
    let mut ions = Vec::with_capacity(2 * pairs.len());
    let mut amps = Vec::with_capacity(2 * pairs.len());
    for (&(i, j), &s) in pairs.iter().zip(scales) {
        ions.extend([i, j]);
        amps.push(shape.iter().map(|x| x * s.abs()).collect());
        amps.push(shape.iter().map(|x| x * s).collect());
    }
    PulseSequence::new(shape.len(), tau, mu, ions, amps)
}

/// A layer driven by one shared pulse shape, rescaled per pair.
#[derive(Clone, Debug)]
pub struct TransplantedLayer {
    pub pulse: PulseSequence,
    /// Isolated design of the source pair.
    pub source: PulseDesign,
    pub source_pair: (usize, usize),
    pub scales: Vec<f64>,
}

/// Design the pair whose midpoint is nearest the crystal centroid on its own,
/// then transplant that shape to every pair of the layer. Displacement
/// closure holds for every pair because it does not depend on which ions
/// are driven; only the phases need rescaling.
#[allow(clippy::too_many_arguments)]
pub fn design_transplanted_layer(
    modes: &ModeData,
    positions: &[[f64; 2]],
    pairs: &[(usize, usize)],
    theta: f64,
    mu: f64,
    tau: f64,
    n_seg: usize,
    options: &EaseOptions,
) -> Result<TransplantedLayer> {
    if pairs.is_empty() {
        return Err(Error::invalid("layer has no gates"));
    }
    if positions.len() != modes.b.nrows() {
        return Err(Error::invalid("one position per ion required"));
    }
    let n = positions.len() as f64;
    let centre = [
        positions.iter().map(|p| p[0]).sum::<f64>() / n,
        positions.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let offset = |&(i, j): &(usize, usize)| {
        let mid = [
            (positions[i][0] + positions[j][0]) / 2.0,
            (positions[i][1] + positions[j][1]) / 2.0,
        ];
        (mid[0] - centre[0]).hypot(mid[1] - centre[1])
    };
    let source_pair = *pairs
        .iter()
        .min_by(|a, b| offset(a).total_cmp(&offset(b)))
        .expect("nonempty");
    let source = design_single_pair(modes, source_pair, theta, mu, tau, n_seg, options)?;
    let kernel = SegmentKernel::new(&modes.omega, mu, tau, n_seg)?;
    let shape = source.pulse.amplitudes[0].clone();
    let scales = rescale_for_boundary(&shape, pairs, modes, &kernel, theta)?;
    let pulse = transplant(&shape, pairs, &scales, mu, tau)?;
    Ok(TransplantedLayer {
        pulse,
        source,
        source_pair,
        scales,
    })
}
