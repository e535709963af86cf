#![allow(clippy::approx_constant)]

//! Shared fixtures and frozen reference values from tests/oracles/oracle.py.
#![allow(dead_code)]

use std::f64::consts::PI;

use sltransfer::{BoundaryAngles, Potential, Problem, TransferMatrix};

pub const S: f64 = PI / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Free,
    Diagonal,
    Shear,
    Bump,
}

pub const ALL: [Fixture; 4] = [
    Fixture::Free,
    Fixture::Diagonal,
    Fixture::Shear,
    Fixture::Bump,
];

pub fn bump(x: f64) -> f64 {
    2.0 * (-4.0 * x * x).exp()
}

impl Fixture {
    pub fn name(self) -> &'static str {
        match self {
            Fixture::Free => "q=0, M=I",
            Fixture::Diagonal => "q=0, M=diag(2,1/2)",
            Fixture::Shear => "q=0, M=[[1,1],[0,1]]",
            Fixture::Bump => "q=2exp(-4x^2), M=diag(2,1/2)",
        }
    }

    pub fn transfer(self) -> TransferMatrix {
        match self {
            Fixture::Free => TransferMatrix::IDENTITY,
            Fixture::Diagonal | Fixture::Bump => TransferMatrix::diag(2.0, 0.5).unwrap(),
            Fixture::Shear => TransferMatrix::new(1.0, 1.0, 0.0, 1.0).unwrap(),
        }
    }

    pub fn problem(self) -> Problem {
        match self {
            Fixture::Bump => {
                Problem::new(Potential::from_fn(S, 2001, bump).unwrap(), self.transfer())
            }
            _ => Problem::free(S, self.transfer()).unwrap(),
        }
    }

    pub fn oracle(self) -> &'static Oracle {
        match self {
            Fixture::Free => &FREE,
            Fixture::Diagonal => &DIAGONAL,
            Fixture::Shear => &SHEAR,
            Fixture::Bump => &BUMP,
        }
    }

    /// Agreement expected with the oracle: exact propagators for q = 0,
    /// an adaptive ODE solve on the analytic bump otherwise.
    pub fn oracle_tolerance(self) -> f64 {
        match self {
            Fixture::Bump => 1e-7,
            _ => 1e-9,
        }
    }
}

pub fn dd() -> BoundaryAngles {
    BoundaryAngles::dirichlet_dirichlet()
}

pub fn nd() -> BoundaryAngles {
    BoundaryAngles::neumann_dirichlet()
}

pub fn nn() -> BoundaryAngles {
    BoundaryAngles::neumann_neumann()
}

pub const PROBES: [f64; 5] = [-20.0, -10.0, -5.0, -2.0, -1.0];

pub struct Oracle {
    pub dd: [f64; 6],
    pub dd_norm: [f64; 5],
    pub nd: [f64; 8],
    pub nn: [f64; 8],
    pub nn_norm: [f64; 5],
    /// `m_{0,pi}` on [`PROBES`].
    pub m_dd: [f64; 5],
    /// `m_{pi/2,pi}` on [`PROBES`].
    pub m_nd: [f64; 5],
    /// `(A, B)` at xi = 0.5, 1, 2.5 as `(re A, im A, re B, im B)`; q = 0 only.
    pub ab: Option<[[f64; 4]; 3]>,
}

pub const AB_XI: [f64; 3] = [0.5, 1.0, 2.5];

pub static FREE: Oracle = Oracle {
    dd: [1.0, 4.0, 9.0, 16.0, 25.0, 36.0],
    dd_norm: [
        1.5707963267948966,
        0.39269908169872414,
        0.17453292519943295,
        0.09817477042468103,
        0.06283185307179587,
    ],
    nd: [0.25, 2.25, 6.25, 12.25, 20.25, 30.25, 42.25, 56.25],
    nn: [0.0, 1.0, 4.0, 9.0, 16.0, 25.0, 36.0, 49.0],
    nn_norm: [
        3.141592653589793,
        1.5707963267948966,
        1.5707963267948966,
        1.5707963267948966,
        1.5707963267948966,
    ],
    m_dd: [
        4.47213595500518,
        3.16227767502624,
        2.2360715161594342,
        1.4146049129624658,
        1.0037418731973213,
    ],
    m_nd: [
        -0.22360679774969897,
        -0.3162277645310519,
        -0.4472128877691491,
        -0.7069111600254517,
        -0.99627207622075,
    ],
    ab: Some([[1.0, 0.0, 0.0, 0.0]; 3]),
};

pub static DIAGONAL: Oracle = Oracle {
    dd: [1.0, 4.0, 9.0, 16.0, 25.0, 36.0],
    dd_norm: [
        3.9269908169872414,
        0.2454369260617026,
        0.4363323129985824,
        0.06135923151542565,
        0.15707963267948966,
    ],
    nd: [
        0.496789226193424,
        1.6774581673968902,
        7.316120284989958,
        10.858127108600357,
        22.135451343786492,
        28.03879604980382,
        44.95478240258303,
        53.219464991007285,
    ],
    nn: [0.0, 1.0, 4.0, 9.0, 16.0, 25.0, 36.0, 49.0],
    nn_norm: [
        7.853981633974483,
        0.9817477042468103,
        3.9269908169872414,
        0.9817477042468103,
        3.9269908169872414,
    ],
    m_dd: [
        4.472140201393393,
        3.1624616015587073,
        2.2384583836962193,
        1.4345684176627043,
        1.0556955957153495,
    ],
    m_nd: [
        -0.22360658543048992,
        -0.3162093729476817,
        -0.4467360247943344,
        -0.6970737593883932,
        -0.9472427507120463,
    ],
    ab: Some([[1.25, 0.0, 0.75, 0.0]; 3]),
};

pub static SHEAR: Oracle = Oracle {
    dd: [
        1.0,
        2.4814900286373938,
        9.0,
        11.17706146753959,
        25.0,
        27.37829409836426,
    ],
    dd_norm: [
        1.5707963267948966,
        0.7573543825539543,
        0.17453292519943295,
        0.15232752784358047,
        0.06283185307179587,
    ],
    nd: [
        0.1868380791822286,
        1.7288973236201473,
        4.984190234418102,
        10.104526090331039,
        17.165725082992775,
        26.199741246542587,
        37.22019332550398,
        50.23330803284398,
    ],
    nn: [
        0.0,
        0.5881313238671774,
        4.0,
        5.941133384994495,
        16.0,
        18.30456430353175,
        36.0,
        38.42377568777239,
    ],
    nn_norm: [
        3.141592653589793,
        2.006703640431741,
        1.5707963267948966,
        1.771980630691158,
        1.5707963267948966,
    ],
    m_dd: [
        4.472131064699304,
        3.1620898869197474,
        2.233969849823831,
        1.4006326897809938,
        0.9731913334456171,
    ],
    m_nd: [
        -0.22360704226526015,
        -0.31624654445674827,
        -0.44763361514429534,
        -0.7139630591917446,
        -1.027547169434263,
    ],
    ab: Some([
        [1.0, -0.25, 0.0, -0.25],
        [1.0, -0.5, 0.0, -0.5],
        [1.0, -1.25, 0.0, -1.25],
    ]),
};

pub static BUMP: Oracle = Oracle {
    dd: [
        1.946787492459229,
        4.34372614064842,
        9.663222477048198,
        16.554953685468973,
        25.5723595864369,
        36.567311524712,
    ],
    dd_norm: [
        2.705045399537331,
        0.22383245276104313,
        0.4297244067125034,
        0.060131362190707235,
        0.15543477394827918,
    ],
    nd: [
        0.8959395205101459,
        2.3402284116841745,
        7.9009552857298555,
        11.437229911561518,
        22.705655789129406,
        28.607613192847538,
        45.52176329164138,
        53.785993232105234,
    ],
    nn: [
        0.47127757960133215,
        1.117584406254454,
        4.8357612582385325,
        9.498459985852557,
        16.59088148099702,
        25.566517561431237,
        36.568132580359666,
        49.56668088949484,
    ],
    nn_norm: [
        5.715058328957189,
        0.9396585936989784,
        4.549249663590762,
        0.9923016463213742,
        4.016694242064471,
    ],
    m_dd: [
        4.472325738893098,
        3.1634195342957767,
        2.2427217727312603,
        1.4530762216670294,
        1.0945939196076162,
    ],
    m_nd: [
        -0.22359730895797858,
        -0.31611361982141095,
        -0.4458867846019826,
        -0.6881951442662508,
        -0.9135808102775451,
    ],
    ab: None,
};

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
