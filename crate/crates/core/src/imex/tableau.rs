//! Additive Runge-Kutta tableaus: an explicit part for the non-stiff terms and
//! an ESDIRK part for the viscous term.
//!
//! Coefficients are stored as exact rationals and converted to `f64` once.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableauId {
    /// ARK4(3)6L[2]SA, fourth order, 6 stages.
    Ark4,
    /// ARK5(4)8L[2]SA₂, fifth order, 8 stages.
    Ark5,
}

impl TableauId {
    pub const ALL: [TableauId; 2] = [TableauId::Ark4, TableauId::Ark5];

    pub fn name(self) -> &'static str {
        match self {
            TableauId::Ark4 => "ARK4(3)6L[2]SA",
            TableauId::Ark5 => "ARK5(4)8L[2]SA2",
        }
    }

    /// Accepts `ark4`, `ark436`, `ark5`, `ark548` (case-insensitive).
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ark4" | "ark436" | "ark4(3)6l[2]sa" => Ok(TableauId::Ark4),
            "ark5" | "ark548" | "ark5(4)8l[2]sa2" => Ok(TableauId::Ark5),
            _ => Err(Error::InvalidArgument(format!(
                "unknown tableau '{s}' (expected ark4 or ark5)"
            ))),
        }
    }
}

impl core::fmt::Display for TableauId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            TableauId::Ark4 => "ark4",
            TableauId::Ark5 => "ark5",
        })
    }
}

type Q = (i64, i64);

/// Lower-triangular rows without the zero first row; row `s` has `s`
/// entries (explicit) or `s + 1` entries (implicit, including the diagonal).
struct RationalTableau {
    order: usize,
    c: &'static [Q],
    explicit: &'static [&'static [Q]],
    implicit: &'static [&'static [Q]],
}

const Z: Q = (0, 1);

static ARK4: RationalTableau = RationalTableau {
    order: 4,
    c: &[Z, (1, 2), (83, 250), (31, 50), (17, 20), (1, 1)],
    explicit: &[
        &[(1, 2)],
        &[(13861, 62500), (6889, 62500)],
        &[
            (-116923316275, 2393684061468),
            (-2731218467317, 15368042101831),
            (9408046702089, 11113171139209),
        ],
        &[
            (-451086348788, 2902428689909),
            (-2682348792572, 7519795681897),
            (12662868775082, 11960479115383),
            (3355817975965, 11060851509271),
        ],
        &[
            (647845179188, 3216320057751),
            (73281519250, 8382639484533),
            (552539513391, 3454668386233),
            (3354512671639, 8306763924573),
            (4040, 17871),
        ],
    ],
    implicit: &[
        &[(1, 4), (1, 4)],
        &[(8611, 62500), (-1743, 31250), (1, 4)],
        &[
            (5012029, 34652500),
            (-654441, 2922500),
            (174375, 388108),
            (1, 4),
        ],
        &[
            (15267082809, 155376265600),
            (-71443401, 120774400),
            (730878875, 902184768),
            (2285395, 8070912),
            (1, 4),
        ],
        &[
            (82889, 524892),
            Z,
            (15625, 83664),
            (69875, 102672),
            (-2260, 8211),
            (1, 4),
        ],
    ],
};

static ARK5: RationalTableau = RationalTableau {
    order: 5,
    c: &[
        Z,
        (4, 9),
        (6456083330201, 8509243623797),
        (1632083962415, 14158861528103),
        (6365430648612, 17842476412687),
        (18, 25),
        (191, 200),
        (1, 1),
    ],
    explicit: &[
        &[(4, 9)],
        &[(1, 9), (1183333538310, 1827251437969)],
        &[
            (895379019517, 9750411845327),
            (477606656805, 13473228687314),
            (-112564739183, 9373365219272),
        ],
        &[
            (-4458043123994, 13015289567637),
            (-2500665203865, 9342069639922),
            (983347055801, 8893519644487),
            (2185051477207, 2551468980502),
        ],
        &[
            (-167316361917, 17121522574472),
            (1605541814917, 7619724128744),
            (991021770328, 13052792161721),
            (2342280609577, 11279663441611),
            (3012424348531, 12792462456678),
        ],
        &[
            (6680998715867, 14310383562358),
            (5029118570809, 3897454228471),
            (2415062538259, 6382199904604),
            (-3924368632305, 6964820224454),
            (-4331110370267, 15021686902756),
            (-3944303808049, 11994238218192),
        ],
        &[
            (2193717860234, 3570523412979),
            (2193717860234, 3570523412979),
            (5952760925747, 18750164281544),
            (-4412967128996, 6196664114337),
            (4151782504231, 36106512998704),
            (572599549169, 6265429158920),
            (-457874356192, 11306498036315),
        ],
    ],
    implicit: &[
        &[(2, 9), (2, 9)],
        &[
            (2366667076620, 8822750406821),
            (2366667076620, 8822750406821),
            (2, 9),
        ],
        &[
            (-257962897183, 4451812247028),
            (-257962897183, 4451812247028),
            (128530224461, 14379561246022),
            (2, 9),
        ],
        &[
            (-486229321650, 11227943450093),
            (-486229321650, 11227943450093),
            (-225633144460, 6633558740617),
            (1741320951451, 6824444397158),
            (2, 9),
        ],
        &[
            (621307788657, 4714163060173),
            (621307788657, 4714163060173),
            (-125196015625, 3866852212004),
            (940440206406, 7593089888465),
            (961109811699, 6734810228204),
            (2, 9),
        ],
        &[
            (2036305566805, 6583108094622),
            (2036305566805, 6583108094622),
            (-3039402635899, 4450598839912),
            (-1829510709469, 31102090912115),
            (-286320471013, 6931253422520),
            (8651533662697, 9642993110008),
            (2, 9),
        ],
        &[
            Z,
            Z,
            (3517720773327, 20256071687669),
            (4569610470461, 17934693873752),
            (2819471173109, 11655438449929),
            (3296210113763, 10722700128969),
            (-1142099968913, 5710983926999),
            (2, 9),
        ],
    ],
};

impl RationalTableau {
    fn entries(&self) -> impl Iterator<Item = Q> + '_ {
        self.c
            .iter()
            .chain(self.explicit.iter().flat_map(|r| r.iter()))
            .chain(self.implicit.iter().flat_map(|r| r.iter()))
            .copied()
    }

    /// FNV-1a over all numerators and denominators.
    fn compute_checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (n, d) in self.entries() {
            for byte in n.to_le_bytes().into_iter().chain(d.to_le_bytes()) {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

fn rational(q: Q) -> f64 {
    q.0 as f64 / q.1 as f64
}

/// Dense additive Butcher tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub name: String,
    pub order: usize,
    pub stages: usize,
    /// Row-major `stages × stages`.
    pub a_explicit: Vec<f64>,
    pub a_implicit: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    pub fn ae(&self, i: usize, j: usize) -> f64 {
        self.a_explicit[i * self.stages + j]
    }

    pub fn ai(&self, i: usize, j: usize) -> f64 {
        self.a_implicit[i * self.stages + j]
    }

    /// Diagonal `a^I_ss`, shared by stages `s ≥ 2`.
    pub fn gamma(&self) -> f64 {
        if self.stages > 1 {
            self.ai(1, 1)
        } else {
            self.ai(0, 0)
        }
    }

    /// Forward Euler written as a one-stage additive pair; not ESDIRK.
    pub fn forward_euler() -> Self {
        Self {
            name: "forward Euler".into(),
            order: 1,
            stages: 1,
            a_explicit: vec![0.0],
            a_implicit: vec![0.0],
            b: vec![1.0],
            c: vec![0.0],
        }
    }
}

pub(crate) const CHECKSUMS: [(TableauId, u64); 2] = [
    (TableauId::Ark4, 0xa46ba7229017b991),
    (TableauId::Ark5, 0x10b6b07f4f6d02f2),
];

fn source(id: TableauId) -> &'static RationalTableau {
    match id {
        TableauId::Ark4 => &ARK4,
        TableauId::Ark5 => &ARK5,
    }
}

/// Builds the tableau `id`, verifying the coefficient checksum.
pub fn load_tableau(id: TableauId) -> Result<ButcherTableau> {
    let src = source(id);
    let expected = CHECKSUMS.iter().find(|(i, _)| *i == id).map(|(_, c)| *c);
    let actual = src.compute_checksum();
    if expected != Some(actual) {
        return Err(Error::Configuration(format!(
            "tableau {} failed its checksum ({actual:#018x})",
            id.name()
        )));
    }
    let s = src.c.len();
    let mut ae = vec![0.0; s * s];
    let mut ai = vec![0.0; s * s];
    for (r, row) in src.explicit.iter().enumerate() {
        for (j, &q) in row.iter().enumerate() {
            ae[(r + 1) * s + j] = rational(q);
        }
    }
    for (r, row) in src.implicit.iter().enumerate() {
        for (j, &q) in row.iter().enumerate() {
            ai[(r + 1) * s + j] = rational(q);
        }
    }
    let b = ai[(s - 1) * s..].to_vec();
    Ok(ButcherTableau {
        name: id.name().into(),
        order: src.order,
        stages: s,
        a_explicit: ae,
        a_implicit: ai,
        b,
        c: src.c.iter().map(|&q| rational(q)).collect(),
    })
}

/// Outcome of [`validate_tableau`].
#[derive(Debug, Clone, PartialEq)]
pub struct TableauReport {
    pub violations: Vec<String>,
    /// Largest residual over all checked identities.
    pub max_residual: f64,
}

impl TableauReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks ESDIRK structure, row sums, stiff accuracy and the order
/// conditions up to `min(order, 3)` for both parts.
pub fn validate_tableau(t: &ButcherTableau, tol: f64) -> TableauReport {
    let s = t.stages;
    let mut report = TableauReport {
        violations: Vec::new(),
        max_residual: 0.0,
    };
    let mut check = |what: String, residual: f64| {
        let r = residual.abs();
        if !(r <= tol) {
            report.violations.push(format!("{what}: residual {r:.3e}"));
        }
        if r.is_finite() {
            report.max_residual = report.max_residual.max(r);
        } else {
            report.max_residual = f64::INFINITY;
        }
    };

    if s < 2 {
        check(
            "ESDIRK needs an explicit first stage and at least two stages".into(),
            f64::INFINITY,
        );
    }
    check("c_1 = 0".into(), t.c[0]);
    for i in 0..s {
        for j in i..s {
            check(format!("explicit a[{i}][{j}] = 0"), t.ae(i, j));
        }
        for j in (i + 1)..s {
            check(format!("implicit a[{i}][{j}] = 0"), t.ai(i, j));
        }
    }
    if s >= 2 {
        check("implicit a[0][0] = 0".into(), t.ai(0, 0));
        let gamma = t.gamma();
        if !(gamma > 0.0) {
            check("diagonal gamma > 0".into(), f64::INFINITY);
        }
        for i in 2..s {
            check(format!("implicit a[{i}][{i}] = gamma"), t.ai(i, i) - gamma);
        }
    }
    for (label, a) in [("explicit", &t.a_explicit), ("implicit", &t.a_implicit)] {
        for i in 0..s {
            let row: f64 = a[i * s..(i + 1) * s].iter().sum();
            check(format!("{label} row sum {i} = c_{i}"), row - t.c[i]);
        }
    }
    for j in 0..s {
        check(
            format!("stiffly accurate b_{j} = a[last][{j}]"),
            t.b[j] - t.ai(s - 1, j),
        );
    }

    let b = &t.b;
    let c = &t.c;
    let p = t.order.min(3);
    check("sum b = 1".into(), b.iter().sum::<f64>() - 1.0);
    if p >= 2 {
        check(
            "sum b c = 1/2".into(),
            (0..s).map(|i| b[i] * c[i]).sum::<f64>() - 0.5,
        );
    }
    if p >= 3 {
        check(
            "sum b c^2 = 1/3".into(),
            (0..s).map(|i| b[i] * c[i] * c[i]).sum::<f64>() - 1.0 / 3.0,
        );
        for (label, a) in [("explicit", &t.a_explicit), ("implicit", &t.a_implicit)] {
            let v: f64 = (0..s)
                .map(|i| b[i] * (0..s).map(|k| a[i * s + k] * c[k]).sum::<f64>())
                .sum();
            check(format!("{label} sum b a c = 1/6"), v - 1.0 / 6.0);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_are_current() {
        for id in TableauId::ALL {
            let actual = source(id).compute_checksum();
            let stored = CHECKSUMS.iter().find(|(i, _)| *i == id).unwrap().1;
            assert_eq!(stored, actual, "{id}: {actual:#018x}");
        }
    }

    #[test]
    fn shipped_tableaus_validate() {
        for id in TableauId::ALL {
            let t = load_tableau(id).unwrap();
            let r = validate_tableau(&t, 1e-13);
            assert!(r.passed(), "{id}: {:?}", r.violations);
            assert!(r.max_residual < 1e-13);
        }
        assert_eq!(load_tableau(TableauId::Ark4).unwrap().gamma(), 0.25);
        assert!((load_tableau(TableauId::Ark5).unwrap().gamma() - 2.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn forward_euler_is_rejected() {
        let r = validate_tableau(&ButcherTableau::forward_euler(), 1e-13);
        assert!(!r.passed());
        assert!(r.violations.iter().any(|v| v.contains("ESDIRK")));
    }

    #[test]
    fn perturbed_coefficient_is_reported() {
        let mut t = load_tableau(TableauId::Ark4).unwrap();
        t.a_explicit[2 * t.stages + 1] += 1e-8;
        let r = validate_tableau(&t, 1e-13);
        assert!(
            r.violations
                .iter()
                .any(|v| v.contains("explicit row sum 2")),
            "{:?}",
            r.violations
        );
    }

    #[test]
    fn parse_ids() {
        assert_eq!(TableauId::parse("ARK4").unwrap(), TableauId::Ark4);
        assert_eq!(TableauId::parse("ark548").unwrap(), TableauId::Ark5);
        assert!(matches!(
            TableauId::parse("rk4"),
            Err(Error::InvalidArgument(_))
        ));
    }

    /// Fourth-order conditions for every combination of the two parts.
    #[test]
    fn fourth_order_coupling_conditions() {
        for id in TableauId::ALL {
            let t = load_tableau(id).unwrap();
            let s = t.stages;
            let (b, c) = (&t.b, &t.c);
            let parts = [&t.a_explicit, &t.a_implicit];
            let mat = |a: &Vec<f64>, v: &[f64]| -> Vec<f64> {
                (0..s)
                    .map(|i| (0..s).map(|k| a[i * s + k] * v[k]).sum())
                    .collect()
            };
            let bdot = |v: &[f64]| -> f64 { (0..s).map(|i| b[i] * v[i]).sum() };
            let c2: Vec<f64> = c.iter().map(|x| x * x).collect();
            let c3: Vec<f64> = c.iter().map(|x| x * x * x).collect();
            assert!((bdot(&c3) - 0.25).abs() < 1e-11);
            for a in parts {
                let ac = mat(a, c);
                let cac: Vec<f64> = (0..s).map(|i| c[i] * ac[i]).collect();
                assert!((bdot(&cac) - 0.125).abs() < 1e-11, "{id}");
                assert!((bdot(&mat(a, &c2)) - 1.0 / 12.0).abs() < 1e-11, "{id}");
                for a2 in parts {
                    assert!(
                        (bdot(&mat(a, &mat(a2, c))) - 1.0 / 24.0).abs() < 1e-11,
                        "{id}"
                    );
                }
            }
        }
    }
}
