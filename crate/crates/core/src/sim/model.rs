use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::params::BuckParams;
use crate::schemes::{compensator, ControlScheme};
use crate::tf::RationalTF;

/// Closed-loop state vector: plant states first, compensator states after.
pub type StateVector = DVector<f64>;

/// `ẋ = A x + B u`, `y = C x + D u` for a single-input single-output block.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.b.len()
    }
}

/// Controllable canonical form of `tf`, built in the time scale `t·ω₀`.
///
/// Realizing `G(ω₀σ)` and rescaling keeps the companion coefficients near
/// unity even when the corners sit at 10⁴–10⁶ rad/s.
pub fn realize(tf: &RationalTF, omega0: f64) -> Result<StateSpace> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::invalid("realization time scale must be positive"));
    }
    let n = tf.denominator_degree();
    let scaled = |c: Vec<f64>| -> Vec<f64> {
        c.iter().enumerate().map(|(k, x)| x * omega0.powi(k as i32)).collect()
    };
    let den = scaled(tf.denominator());
    let mut num = scaled(tf.numerator());
    num.resize(n + 1, 0.0);
    let lead = den[n];
    let a_coef: Vec<f64> = den.iter().map(|x| x / lead).collect();
    let b_coef: Vec<f64> = num.iter().map(|x| x / lead).collect();
    let d = b_coef[n];

    let mut a = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        a[(i, i + 1)] = 1.0;
    }
    for k in 0..n {
        a[(n - 1, k)] = -a_coef[k];
    }
    let mut b = DVector::zeros(n);
    if n > 0 {
        b[n - 1] = 1.0;
    }
    let c = DVector::from_iterator(n, (0..n).map(|k| b_coef[k] - d * a_coef[k]));
    Ok(StateSpace {
        a: a * omega0,
        b: b * omega0,
        c,
        d,
    })
}

/// The switched closed loop: two affine stages sharing `A`.
///
/// Stage S₁ (switch on) drives the plant with `v_s`, stage S₂ with zero.
/// The modulator compares `y = c_y·x + d_y` against the ramp.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    pub a: DMatrix<f64>,
    pub b_on: DVector<f64>,
    pub b_off: DVector<f64>,
    pub c_y: DVector<f64>,
    pub d_y: f64,
    /// `v_o = c_vo · x`.
    pub c_vo: DVector<f64>,
    pub period: f64,
    pub v_l: f64,
    pub v_m: f64,
    pub v_s: f64,
    pub state_names: Vec<String>,
}

impl ClosedLoop {
    pub fn dim(&self) -> usize {
        self.b_on.len()
    }

    pub fn output_y(&self, x: &StateVector) -> f64 {
        self.c_y.dot(x) + self.d_y
    }

    pub fn output_vo(&self, x: &StateVector) -> f64 {
        self.c_vo.dot(x)
    }

    pub fn ramp(&self, t: f64) -> f64 {
        self.v_l + self.v_m * t / self.period
    }
}

/// Assemble the switched closed loop of `scheme` around the buck stage.
pub fn build_closed_loop(params: &BuckParams, scheme: &ControlScheme) -> Result<ClosedLoop> {
    params.validate()?;
    scheme.validate()?;
    let (l, r) = (params.l, params.r);

    // Plant: A_p, input vector for v_d = 1, and v_o, i_L output rows.
    let (a_p, b_p, c_vo, c_il, mut names) = if let ControlScheme::Rlp { .. } = scheme {
        (
            DMatrix::from_element(1, 1, -r / l),
            DVector::from_element(1, 1.0 / l),
            DVector::from_element(1, r),
            DVector::from_element(1, 1.0),
            vec!["i_L".to_string()],
        )
    } else {
        let c = params.capacitance()?;
        let rho = params.rho();
        let r_c = params.r_c;
        // di/dt = (v_d − v_o)/L, C dv_C/dt = i − v_o/R, v_o = ρ(v_C + R_c i)
        let a_p = DMatrix::from_row_slice(
            2,
            2,
            &[-rho * r_c / l, -rho / l, (1.0 - rho * r_c / r) / c, -rho / (r * c)],
        );
        (
            a_p,
            DVector::from_row_slice(&[1.0 / l, 0.0]),
            DVector::from_row_slice(&[rho * r_c, rho]),
            DVector::from_row_slice(&[1.0, 0.0]),
            vec!["i_L".to_string(), "v_C".to_string()],
        )
    };
    let np = a_p.nrows();
    let v_r = params.v_r;

    // Error signal u = c_u·x + d_u feeding the dynamic compensator, or the
    // static output map directly.
    let comp = compensator(params, scheme)?;
    let (c_u, d_u, static_y) = match *scheme {
        ControlScheme::Cmc => (-&c_il, v_r, true),
        ControlScheme::Pvmc { k_p } | ControlScheme::Rlp { k_p } => (-&c_vo * k_p, k_p * v_r, true),
        ControlScheme::Cfpvr { k_p } => (-&c_vo * k_p, v_r, true),
        ControlScheme::Acmc { r_s, .. } => (-&c_il * r_s, v_r, false),
        ControlScheme::Vmc3 { .. } => (-&c_vo, v_r, false),
    };

    let ss = match (&comp, static_y) {
        (Some(tf), false) => Some(realize(tf, params.omega_s())?),
        _ => None,
    };
    let nc = ss.as_ref().map_or(0, StateSpace::order);
    let n = np + nc;

    let mut a = DMatrix::zeros(n, n);
    a.view_mut((0, 0), (np, np)).copy_from(&a_p);
    let mut b_unit = DVector::zeros(n);
    b_unit.rows_mut(0, np).copy_from(&b_p);
    let mut b_const = DVector::zeros(n);
    let mut c_y = DVector::zeros(n);
    let d_y;
    match &ss {
        Some(ss) => {
            a.view_mut((np, np), (nc, nc)).copy_from(&ss.a);
            a.view_mut((np, 0), (nc, np)).copy_from(&(&ss.b * c_u.transpose()));
            b_const.rows_mut(np, nc).copy_from(&(&ss.b * d_u));
            c_y.rows_mut(0, np).copy_from(&(&c_u * ss.d));
            c_y.rows_mut(np, nc).copy_from(&ss.c);
            d_y = ss.d * d_u;
            names.extend((1..=nc).map(|k| format!("x_c{k}")));
        }
        None => {
            c_y.rows_mut(0, np).copy_from(&c_u);
            d_y = d_u;
        }
    }
    let mut c_vo_full = DVector::zeros(n);
    c_vo_full.rows_mut(0, np).copy_from(&c_vo);

    Ok(ClosedLoop {
        b_on: &b_unit * params.v_s + &b_const,
        b_off: b_const,
        a,
        c_y,
        d_y,
        c_vo: c_vo_full,
        period: params.period(),
        v_l: params.v_l,
        v_m: params.ramp_amplitude(),
        v_s: params.v_s,
        state_names: names,
    })
}
