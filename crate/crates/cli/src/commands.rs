use std::path::Path;
use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4};
use spincurve::bruhat::{classify_so, classify_spin};
use spincurve::curves::{families, SampledCurve, SampledProfile, SharedProfile};
use spincurve::decompose::{check_condition, compose3, decompose3, Condition, CurvePair};
use spincurve::spin_algebra::{Spin4Element, UnitQuaternion};
use spincurve::surgery::{self, RRParams, SurgerySpec};
use spincurve::verify;

use crate::error::CliError;
use crate::file::CurveFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Xi,
    Sigma,
    Gamma11,
    Gamma12,
    Omega3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutKind {
    Profile,
    Samples,
}

pub struct GenArgs {
    pub family: Family,
    pub c: f64,
    pub turns: f64,
    pub coeffs: Vec<f64>,
    pub freqs: Vec<f64>,
    pub n: usize,
    pub kind: Option<OutKind>,
}

fn grid(n: usize) -> Result<spincurve::curves::Grid, CliError> {
    Ok(spincurve::curves::Grid::new(n)?)
}

fn coeff_pair(v: &[f64], what: &str) -> Result<[f64; 2], CliError> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(CliError::Precondition(format!(
            "{what} needs exactly two values, got {}",
            v.len()
        ))),
    }
}

pub fn generate(args: &GenArgs) -> Result<CurveFile, CliError> {
    let g = grid(args.n)?;
    let default = match args.family {
        Family::Xi | Family::Omega3 => OutKind::Samples,
        _ => OutKind::Profile,
    };
    let kind = args.kind.unwrap_or(default);
    let file = match (args.family, kind) {
        (Family::Sigma, OutKind::Profile) => CurveFile::from_profile(&SampledProfile::from_fn(
            g,
            Arc::new(families::sigma_profile(args.c, args.turns)?),
        )?),
        (Family::Sigma, OutKind::Samples) => {
            CurveFile::from_curve(&families::sigma(args.c, args.turns, g)?)
        }
        (Family::Xi, kind) => {
            let c = coeff_pair(&args.coeffs, "--coeffs")?;
            let curve = match args.freqs.as_slice() {
                [a] => CurveFile::from_curve(&families::xi2(c, *a, g)?),
                [a, b] => CurveFile::from_curve(&families::xi3(c, [*a, *b], g)?),
                other => {
                    return Err(CliError::Precondition(format!(
                        "--freqs needs one (S2) or two (S3) values, got {}",
                        other.len()
                    )))
                }
            };
            if kind == OutKind::Profile {
                to_profile(&curve)?
            } else {
                curve
            }
        }
        (Family::Gamma11 | Family::Gamma12 | Family::Omega3, OutKind::Profile) => {
            let m = match args.family {
                Family::Gamma11 => 1.0,
                Family::Gamma12 => 2.0,
                _ => 4.0,
            };
            CurveFile::from_profile(&SampledProfile::from_fn(
                g,
                Arc::new(families::gamma_family_profile(m)),
            )?)
        }
        (Family::Gamma11, OutKind::Samples) => CurveFile::from_curve(&families::gamma_1_1(g)?),
        (Family::Gamma12, OutKind::Samples) => CurveFile::from_curve(&families::gamma_1_2(g)?),
        (Family::Omega3, OutKind::Samples) => CurveFile::from_curve(&families::omega3(g)?),
    };
    let name = match args.family {
        Family::Xi => "xi",
        Family::Sigma => "sigma",
        Family::Gamma11 => "gamma11",
        Family::Gamma12 => "gamma12",
        Family::Omega3 => "omega3",
    };
    Ok(file.with_meta("family", name))
}

fn to_profile(f: &CurveFile) -> Result<CurveFile, CliError> {
    let out = match f.sphere_dim {
        2 => CurveFile::from_profile(&f.profile2()?),
        _ => CurveFile::from_profile(&f.profile3()?),
    };
    Ok(CurveFile {
        meta: f.meta.clone(),
        ..out
    })
}

pub struct Decomposed {
    pub left: CurveFile,
    pub right: CurveFile,
    pub z_l: UnitQuaternion,
    pub z_r: UnitQuaternion,
}

pub fn decompose(input: &CurveFile) -> Result<Decomposed, CliError> {
    let pair = decompose3(&input.profile3()?)?;
    let (z_l, z_r) = (pair.z_l(), pair.z_r());
    Ok(Decomposed {
        left: CurveFile::from_profile(&pair.left())
            .with_meta("half", "left")
            .with_meta("z", z_l.to_string()),
        right: CurveFile::from_profile(&pair.right())
            .with_meta("half", "right")
            .with_meta("z", z_r.to_string()),
        z_l,
        z_r,
    })
}

fn pair_from(left: &CurveFile, right: &CurveFile) -> Result<CurvePair, CliError> {
    Ok(CurvePair::from_halves(
        &left.profile2()?,
        &right.profile2()?,
    )?)
}

pub fn compose(left: &CurveFile, right: &CurveFile) -> Result<CurveFile, CliError> {
    let pair = pair_from(left, right)?;
    Ok(CurveFile::from_profile(&compose3(&pair)?))
}

fn numbers(path: &Path) -> Result<Vec<f64>, CliError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| CliError::Io(format!("{name}: {s}: {e}")))
        })
        .collect()
}

/// Lines describing the Bruhat cell of a rotation matrix (row-major, 9 or 16 entries).
pub fn classify_matrix(path: &Path) -> Result<Vec<String>, CliError> {
    let x = numbers(path)?;
    let rep = match x.len() {
        9 => classify_so(&Matrix3::from_row_slice(&x))?.rep,
        16 => classify_so(&Matrix4::from_row_slice(&x))?.rep,
        k => {
            return Err(CliError::Precondition(format!(
                "expected 9 or 16 matrix entries, got {k}"
            )))
        }
    };
    Ok(vec![
        format!("cell {rep}"),
        format!("inv {}", rep.inv_count()),
    ])
}

/// Lines describing the lifted Bruhat cell of a unit quaternion (4 numbers) or a
/// pair of them (8 numbers, left then right).
pub fn classify_spin_file(path: &Path) -> Result<Vec<String>, CliError> {
    let x = numbers(path)?;
    let (rep, lift) = match x.len() {
        4 => {
            let z = UnitQuaternion::from_coords(x[0], x[1], x[2], x[3])?;
            let c = classify_spin::<3, UnitQuaternion>(&z)?;
            (c.rep_so, c.lift.to_string())
        }
        8 => {
            let z = Spin4Element::new(
                UnitQuaternion::from_coords(x[0], x[1], x[2], x[3])?,
                UnitQuaternion::from_coords(x[4], x[5], x[6], x[7])?,
            );
            let c = classify_spin::<4, Spin4Element>(&z)?;
            (c.rep_so, c.lift.to_string())
        }
        k => {
            return Err(CliError::Precondition(format!(
                "expected 4 or 8 spin coordinates, got {k}"
            )))
        }
    };
    Ok(vec![
        format!("cell {rep}"),
        format!("inv {}", rep.inv_count()),
        format!("lift {lift}"),
    ])
}

/// Runs the named checks (all of them when `names` is empty).
pub fn check(names: &[String], seed: u64) -> Result<Vec<verify::Report>, CliError> {
    if names.is_empty() {
        return Ok(verify::run_all(seed));
    }
    names
        .iter()
        .map(|n| {
            verify::find(n).map(|c| c.report(seed)).ok_or_else(|| {
                CliError::Precondition(format!("unknown check {n}; known: {}", known_checks()))
            })
        })
        .collect()
}

pub fn known_checks() -> String {
    verify::CRITERIA
        .iter()
        .map(|c| c.key)
        .collect::<Vec<_>>()
        .join(", ")
}

fn shared<const C: usize>(p: SampledProfile<C>) -> SharedProfile<C> {
    Arc::new(p)
}

/// Inserts the loops at `t0` and samples the result on `n` intervals.
pub fn add_loop(input: &CurveFile, t0: f64, epsilon: f64, n: usize) -> Result<CurveFile, CliError> {
    let g = grid(n)?;
    let out = match input.sphere_dim {
        2 => {
            let spec = SurgerySpec::sphere2(t0).with_epsilon(epsilon);
            let p = surgery::add_loops(shared(input.profile2()?), &spec)?;
            CurveFile::from_profile(&SampledProfile::from_fn(g, Arc::new(p))?)
        }
        _ => {
            let spec = SurgerySpec::sphere3(t0).with_epsilon(epsilon);
            let p = surgery::add_loops(shared(input.profile3()?), &spec)?;
            CurveFile::from_profile(&SampledProfile::from_fn(g, Arc::new(p))?)
        }
    };
    Ok(out.with_meta("surgery", format!("add-loop t0={t0} epsilon={epsilon}")))
}

pub struct RrOutput {
    pub file: CurveFile,
    /// Bruhat cell report of the pair `(γ, RR γ)` when requested.
    pub hat: Option<Vec<String>>,
}

pub fn relax_reflect(
    input: &CurveFile,
    epsilon: f64,
    delta: f64,
    hat: bool,
) -> Result<RrOutput, CliError> {
    let gamma = input.profile2()?;
    let params = RRParams::new(epsilon, delta)?;
    let rr = surgery::relax_reflect(&gamma, params)?;
    let file = CurveFile::from_profile(&rr)
        .with_meta("surgery", format!("rr epsilon={epsilon} delta={delta}"));
    let hat = if hat {
        let h = surgery::hat_pair(&gamma, params)?;
        Some(vec![
            format!("cell {}", h.cell.rep_so),
            format!("lift {}", h.cell.lift),
            format!("expected {}", h.expected),
            format!("in expected cell {}", h.in_expected_cell()?),
        ])
    } else {
        None
    };
    Ok(RrOutput { file, hat })
}

pub struct SharpOutput {
    pub left: CurveFile,
    pub right: CurveFile,
    pub summary: Vec<String>,
}

pub fn sharp(
    left: &CurveFile,
    right: &CurveFile,
    t0: f64,
    epsilon: f64,
    n: usize,
) -> Result<SharpOutput, CliError> {
    let pair = pair_from(left, right)?;
    let r = surgery::sharp(&pair, t0, epsilon)?;
    let g = grid(n)?;
    let resample = |p: SampledProfile<2>| -> Result<CurveFile, CliError> {
        Ok(CurveFile::from_profile(&SampledProfile::from_fn(
            g,
            Arc::new(p),
        )?))
    };
    let tag = format!("sharp t0={t0} epsilon={epsilon}");
    Ok(SharpOutput {
        left: resample(r.pair.left())?.with_meta("surgery", tag.clone()),
        right: resample(r.pair.right())?.with_meta("surgery", tag),
        summary: vec![
            format!("K0 {:.6} K1 {:.6} K2 {:.6}", r.k0, r.k1, r.k2),
            format!(
                "condition L {}",
                check_condition(&r.pair, Condition::L).holds
            ),
            format!("z_l {} z_r {}", r.pair.z_l(), r.pair.z_r()),
        ],
    })
}

fn csv_row(t: f64, x: impl IntoIterator<Item = f64>, p: &[f64]) -> String {
    let mut cells = vec![format!("{t:.16e}")];
    cells.extend(
        x.into_iter()
            .chain(p.iter().copied())
            .map(|v| format!("{v:.16e}")),
    );
    cells.join(",")
}

fn rows<const M: usize, const C: usize>(
    curve: &SampledCurve<M>,
    p: &SampledProfile<C>,
) -> Vec<String> {
    let g = curve.grid();
    (0..g.len())
        .map(|i| csv_row(g.t(i), curve.point(i).iter().copied(), &p.value(i)))
        .collect()
}

/// Points and profile as CSV with header `t,x1,…,v,kappa[,tau]`.
pub fn plot_data(input: &CurveFile) -> Result<String, CliError> {
    let (header, body) = match input.sphere_dim {
        2 => {
            let c = input.curve2()?;
            let p = resample_like(input.profile2()?, &c)?;
            ("t,x1,x2,x3,v,kappa", rows(&c, &p))
        }
        _ => {
            let c = input.curve3()?;
            let p = resample_like(input.profile3()?, &c)?;
            ("t,x1,x2,x3,x4,v,kappa,tau", rows(&c, &p))
        }
    };
    let mut s = String::from(header);
    s.push('\n');
    for r in body {
        s.push_str(&r);
        s.push('\n');
    }
    Ok(s)
}

fn resample_like<const C: usize, const M: usize>(
    p: SampledProfile<C>,
    c: &SampledCurve<M>,
) -> Result<SampledProfile<C>, CliError> {
    if p.grid() == c.grid() {
        Ok(p)
    } else {
        Ok(SampledProfile::from_fn(c.grid(), Arc::new(p))?)
    }
}
