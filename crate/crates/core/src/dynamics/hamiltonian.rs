use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::hilbert::{SparseOp, TruncatedHilbert};
use crate::error::{Error, Result};
use crate::ionchain::ModeTable;
use crate::linalg::{CMat, C64};
use crate::network::BeamSplitterSpec;

/// Raised-sine pulse envelope: amplitude rises as `sin(pi/2 * s)` over the first
/// `ramp_fraction` of the pulse, falls symmetrically, and is 1 in between.
/// The integrated squared amplitude is `duration * (1 - ramp_fraction)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub duration: f64,
    pub ramp_fraction: f64,
}

impl Envelope {
    pub fn new(duration: f64, ramp_fraction: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        if !(0.0..=0.5).contains(&ramp_fraction) {
            return Err(Error::invalid("ramp_fraction", "must lie in [0, 0.5]"));
        }
        Ok(Self { duration, ramp_fraction })
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        let ramp = self.ramp_fraction * self.duration;
        if ramp == 0.0 {
            return 1.0;
        }
        let edge = t.min(self.duration - t);
        if edge >= ramp {
            1.0
        } else {
            (FRAC_PI_2 * edge / ramp).sin()
        }
    }

    /// `int_0^t value(s)^2 ds`.
    pub fn area(&self, t: f64) -> f64 {
        let ramp = self.ramp_fraction * self.duration;
        let total = self.duration - ramp;
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.duration {
            return total;
        }
        if ramp == 0.0 {
            return t;
        }
        let edge = |u: f64| u / 2.0 - ramp / (2.0 * PI) * (PI * u / ramp).sin();
        if t <= ramp {
            edge(t)
        } else if t <= self.duration - ramp {
            ramp / 2.0 + (t - ramp)
        } else {
            total - edge(self.duration - t)
        }
    }

    /// Times at which the envelope is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let ramp = self.ramp_fraction * self.duration;
        vec![0.0, ramp, self.duration - ramp, self.duration]
    }
}

/// Time dependence of one Hamiltonian term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coefficient {
    Constant(C64),
    /// `amplitude * e(t) * exp(-i (detuning t + chirp A(t)))` with envelope
    /// `e` and `A(t) = int_0^t e^2`, angular units. The chirp term shifts the
    /// frequency in proportion to the instantaneous intensity.
    Tone {
        amplitude: C64,
        detuning: f64,
        chirp: f64,
        envelope: Option<Envelope>,
    },
}

impl Coefficient {
    #[inline]
    pub fn value(&self, t: f64) -> C64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Tone {
                amplitude,
                detuning,
                chirp,
                envelope,
            } => {
                let (e, area) = envelope.map_or((1.0, t), |e| (e.value(t), e.area(t)));
                if e == 0.0 {
                    return C64::default();
                }
                amplitude * e * C64::from_polar(1.0, -detuning * t - chirp * area)
            }
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            Coefficient::Constant(c) => Coefficient::Constant(c.conj()),
            Coefficient::Tone {
                amplitude,
                detuning,
                chirp,
                envelope,
            } => Coefficient::Tone {
                amplitude: amplitude.conj(),
                detuning: -detuning,
                chirp: -chirp,
                envelope,
            },
        }
    }
}

/// `H(t) = sum_k c_k(t) O_k` in angular units (rad/s).
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    dim: usize,
    terms: Vec<(Coefficient, SparseOp)>,
    breakpoints: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
            breakpoints: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Adds a Hermitian operator with a real constant prefactor.
    pub fn add_hermitian(&mut self, scale: f64, op: SparseOp) {
        assert_eq!(op.dim(), self.dim);
        self.terms.push((Coefficient::Constant(C64::new(scale, 0.0)), op));
    }

    /// Adds `c(t) O + c(t)* O^dagger`.
    pub fn add_with_conjugate(&mut self, coef: Coefficient, op: SparseOp) {
        assert_eq!(op.dim(), self.dim);
        if let Coefficient::Tone {
            envelope: Some(e), ..
        } = coef
        {
            for b in e.breakpoints() {
                if !self.breakpoints.iter().any(|&x| (x - b).abs() < 1e-15 * b.abs().max(1e-300)) {
                    self.breakpoints.push(b);
                }
            }
            self.breakpoints.sort_by(f64::total_cmp);
        }
        let adj = op.adjoint();
        self.terms.push((coef, op));
        self.terms.push((coef.conj(), adj));
    }

    /// `out = -i H(t) psi`
    pub fn schrodinger_rhs(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        out.fill(C64::default());
        let minus_i = C64::new(0.0, -1.0);
        for (c, op) in &self.terms {
            let v = c.value(t);
            if v != C64::default() {
                op.apply_add(minus_i * v, psi, out);
            }
        }
    }

    /// `out += coef * H(t) X` (column-major `n x n`).
    pub fn left_mul_add(&self, t: f64, coef: C64, x: &[C64], out: &mut [C64]) {
        for (c, op) in &self.terms {
            let v = c.value(t);
            if v != C64::default() {
                op.left_mul_add(coef * v, x, out, self.dim);
            }
        }
    }

    /// `out += coef * X H(t)` (column-major `n x n`).
    pub fn right_mul_add(&self, t: f64, coef: C64, x: &[C64], out: &mut [C64]) {
        for (c, op) in &self.terms {
            let v = c.value(t);
            if v != C64::default() {
                op.right_mul_add(coef * v, x, out, self.dim);
            }
        }
    }

    pub fn to_dense(&self, t: f64) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (c, op) in &self.terms {
            m += op.to_dense() * c.value(t);
        }
        m
    }
}

/// One frequency component of the bichromatic drive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    /// Chain mode this tone addresses (0-based).
    pub mode: usize,
    /// Tone frequency minus the qubit frequency, Hz.
    pub offset_hz: f64,
    /// Extra frequency shift at full amplitude, scaled by the instantaneous
    /// intensity `envelope^2`, Hz. Used to track light shifts through ramps.
    #[serde(default)]
    pub chirp_hz: f64,
    /// Carrier Rabi frequency at full amplitude, Hz.
    pub rabi_hz: f64,
    pub phase: f64,
}

/// Laser drive on one ion: a set of tones sharing an envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub ion: usize,
    /// Qubit frequency `f_0`, Hz; the rotating frame.
    pub qubit_hz: f64,
    pub tones: Vec<Tone>,
    pub ramp_fraction: f64,
    pub duration_s: f64,
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        Envelope::new(self.duration_s, self.ramp_fraction)?;
        if self.tones.is_empty() {
            return Err(Error::invalid("tones", "at least one tone is required"));
        }
        for (i, t) in self.tones.iter().enumerate() {
            if !(t.rabi_hz >= 0.0 && t.rabi_hz.is_finite()) {
                return Err(Error::invalid(format!("tones[{i}].rabi_hz"), "must be finite and non-negative"));
            }
            if !t.offset_hz.is_finite() || !t.phase.is_finite() {
                return Err(Error::invalid(format!("tones[{i}]"), "offset and phase must be finite"));
            }
        }
        Ok(())
    }

    pub fn envelope(&self) -> Result<Envelope> {
        Envelope::new(self.duration_s, self.ramp_fraction)
    }

    /// Two-tone drive realizing a physically parameterized beam splitter.
    ///
    /// Tone `t` sits at `Delta - nu_t` from the qubit with Rabi frequency
    /// `|c_t / eta_{j,t}|`. The phase of the `n` tone is chosen so that, with the
    /// spin starting in the down state, the second-order exchange reproduces
    /// the mode-space block of [`crate::network::bs_mode_unitary`].
    ///
    /// Both tones are chirped by the carrier light shift of the qubit when
    /// `carrier` is set (the simulation will include carrier terms), and the
    /// `n` tone additionally by the differential sideband light shift of the
    /// two driven modes, so the detuning stays `Delta` and the exchange stays
    /// resonant throughout the pulse, ramps included.
    pub fn for_beamsplitter(spec: &BeamSplitterSpec, modes: &ModeTable, carrier: bool) -> Result<Self> {
        spec.validate()?;
        let p = spec.physical.ok_or(Error::IncompleteSpec { index: 0 })?;
        p.validate()?;
        let (m, n, j) = (spec.mode_m, spec.mode_n, spec.ion);
        for &k in &[m, n] {
            if k >= modes.n_modes() {
                return Err(Error::ModeOutOfRange {
                    index: k,
                    n_modes: modes.n_modes(),
                });
            }
        }
        if j >= modes.n_ions() {
            return Err(Error::invalid("ion", format!("{j} is not an ion of a {}-ion chain", modes.n_ions())));
        }
        if p.delta_hz == 0.0 {
            return Err(Error::Resonance { mode: m, tone: m });
        }
        let (eta_m, eta_n) = (modes.eta(j, m), modes.eta(j, n));
        if eta_m == 0.0 || eta_n == 0.0 {
            return Err(Error::invalid("ion", format!("ion {j} does not couple to both modes")));
        }
        let flips = usize::from(spec.spin_sign > 0.0) + usize::from(eta_m * eta_n * p.delta_hz < 0.0);
        let phase_n = (spec.phi + PI * flips as f64).rem_euclid(2.0 * PI);
        let f = &modes.frequencies;
        let mut drive = Self {
            ion: j,
            qubit_hz: crate::units::YB171_QUBIT_HZ,
            tones: vec![
                Tone {
                    mode: m,
                    offset_hz: p.delta_hz - f[m],
                    chirp_hz: 0.0,
                    rabi_hz: (p.coupling_m_hz / eta_m).abs(),
                    phase: 0.0,
                },
                Tone {
                    mode: n,
                    offset_hz: p.delta_hz - f[n],
                    chirp_hz: 0.0,
                    rabi_hz: (p.coupling_n_hz / eta_n).abs(),
                    phase: phase_n,
                },
            ],
            ramp_fraction: p.ramp_fraction,
            duration_s: p.duration_s,
        };
        for _ in 0..6 {
            let q = if carrier { drive.carrier_shift_hz() } else { 0.0 };
            let diff = drive.stark_shift_hz(modes, m, q) - drive.stark_shift_hz(modes, n, q);
            drive.tones[0].chirp_hz = q;
            drive.tones[1].chirp_hz = q + diff;
        }
        Ok(drive)
    }

    /// Increase of the qubit splitting from the off-resonant carrier couplings,
    /// `-sum_t Omega_t^2 / (2 offset_t)`, Hz.
    pub fn carrier_shift_hz(&self) -> f64 {
        -self
            .tones
            .iter()
            .map(|t| t.offset_hz + t.chirp_hz)
            .zip(&self.tones)
            .filter(|(f, _)| *f != 0.0)
            .map(|(f, t)| t.rabi_hz.powi(2) / (2.0 * f))
            .sum::<f64>()
    }

    /// Second-order light shift of `|1_k, down>` relative to the vacuum from
    /// the red-sideband couplings of all tones:
    /// `sum_t (eta_{j,k} Omega_t)^2 / (4 delta_{k,t})` with
    /// `delta_{k,t} = offset_t + nu_k - qubit_shift`, Hz.
    pub fn stark_shift_hz(&self, modes: &ModeTable, k: usize, qubit_shift: f64) -> f64 {
        let eta = modes.eta(self.ion, k);
        self.tones
            .iter()
            .map(|t| {
                let d = t.offset_hz + t.chirp_hz + modes.frequencies[k] - qubit_shift;
                if d == 0.0 {
                    0.0
                } else {
                    (eta * t.rabi_hz).powi(2) / (4.0 * d)
                }
            })
            .sum()
    }
}

/// Interaction-picture Hamiltonian of a drive on the truncated space: for every
/// tone, a carrier term (optional) and a red-sideband term on every included mode.
pub fn drive_hamiltonian(
    drive: &DriveSpec,
    modes: &ModeTable,
    hilbert: &TruncatedHilbert,
    carrier: bool,
) -> Result<Hamiltonian> {
    drive.validate()?;
    if hilbert.spin != Some(drive.ion) {
        return Err(Error::invalid(
            "hilbert",
            format!("the spin of ion {} must be included", drive.ion),
        ));
    }
    for &k in &hilbert.modes {
        if k >= modes.n_modes() {
            return Err(Error::ModeOutOfRange {
                index: k,
                n_modes: modes.n_modes(),
            });
        }
    }
    for t in &drive.tones {
        hilbert.local(t.mode)?;
    }
    let env = drive.envelope()?;
    let sp = hilbert.sigma_plus()?;
    let mut h = Hamiltonian::new(hilbert.dim());
    let two_pi = 2.0 * PI;
    for tone in &drive.tones {
        let g = PI * tone.rabi_hz;
        if g == 0.0 {
            continue;
        }
        let phase = C64::from_polar(1.0, tone.phase);
        if carrier {
            h.add_with_conjugate(
                Coefficient::Tone {
                    amplitude: phase * g,
                    detuning: two_pi * tone.offset_hz,
                    chirp: two_pi * tone.chirp_hz,
                    envelope: Some(env),
                },
                sp.clone(),
            );
        }
        for (l, &k) in hilbert.modes.iter().enumerate() {
            let eta = modes.eta(drive.ion, k);
            if eta == 0.0 {
                continue;
            }
            h.add_with_conjugate(
                Coefficient::Tone {
                    amplitude: C64::new(0.0, eta * g) * phase,
                    detuning: two_pi * (tone.offset_hz + modes.frequencies[k]),
                    chirp: two_pi * tone.chirp_hz,
                    envelope: Some(env),
                },
                hilbert.lower(l).mul(&sp),
            );
        }
    }
    Ok(h)
}

/// Mode-space beam-splitter generator `kappa a_m^dag a_n + h.c.` with constant
/// rate, realizing angle `theta` after `duration` and the block convention of
/// [`crate::network::bs_mode_unitary`] (`kappa = -s e^{i phi} theta / duration`).
/// With a spin present the generator is multiplied by `-sigma_z`, which leaves
/// the spin-down dynamics unchanged.
pub fn effective_bs_hamiltonian(
    hilbert: &TruncatedHilbert,
    m: usize,
    n: usize,
    theta: f64,
    phi: f64,
    spin_sign: f64,
    duration: f64,
) -> Result<Hamiltonian> {
    if !(duration > 0.0) {
        return Err(Error::invalid("duration", "must be positive"));
    }
    let (lm, ln) = (hilbert.local(m)?, hilbert.local(n)?);
    if lm == ln {
        return Err(Error::InvalidPair { m, n });
    }
    let s = if spin_sign < 0.0 { -1.0 } else { 1.0 };
    let kappa = C64::from_polar(-s * theta / duration, phi);
    let mut op = hilbert.lower(lm).adjoint().mul(&hilbert.lower(ln));
    if hilbert.spin.is_some() {
        op = op.mul(&hilbert.sigma_z()?.scale(C64::new(-1.0, 0.0)));
    }
    let mut h = Hamiltonian::new(hilbert.dim());
    h.add_with_conjugate(Coefficient::Constant(kappa), op);
    Ok(h)
}
