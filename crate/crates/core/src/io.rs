//! JSON function specifications and CSV artifacts.
//!
//! Complex numbers appear as `[re, im]` in JSON and as two columns in CSV.
//! Floats are written with 17 significant digits so that every file reads
//! back bit for bit.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{FourierTail, MainPart, Polynomial, SineTypeBase, ThetaFunction};
use crate::sturm_liouville::{Profile, Spectrum};
use crate::zeros::ZeroSequence;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BaseSpec {
    Sin { b: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    #[serde(rename = "M")]
    pub m: usize,
    pub modes: BTreeMap<i64, [f64; 2]>,
}

/// `{"base": {...}, "poly": [[re, im], ...], "tail": {"M": .., "modes": {..}}}`
/// with polynomial coefficients in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub base: BaseSpec,
    pub poly: Vec<[f64; 2]>,
    pub tail: TailSpec,
}

fn to_c(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl TailSpec {
    pub fn from_tail(tail: &FourierTail) -> Self {
        TailSpec { m: tail.cutoff(), modes: tail.modes().filter(|(_, c)| *c != C64::new(0.0, 0.0)).map(|(k, c)| (k, to_pair(c))).collect() }
    }

    pub fn to_tail(&self, b: f64) -> Result<FourierTail> {
        FourierTail::from_modes(b, self.m, self.modes.iter().map(|(&k, &v)| (k, to_c(v))))
    }
}

impl FunctionSpec {
    pub fn from_theta(theta: &ThetaFunction) -> Result<Self> {
        let main = theta.main();
        if !main.base().is_sin_scaled() {
            return Err(Error::InvalidInput("only sin bases can be serialized".into()));
        }
        Ok(FunctionSpec {
            base: BaseSpec::Sin { b: main.type_b() },
            poly: main.poly().coeffs().iter().map(|&c| to_pair(c)).collect(),
            tail: TailSpec::from_tail(theta.tail()),
        })
    }

    pub fn main(&self) -> Result<MainPart> {
        let BaseSpec::Sin { b } = self.base;
        if self.poly.is_empty() {
            return Err(Error::InvalidInput("poly needs at least one coefficient".into()));
        }
        MainPart::new(SineTypeBase::sin_scaled(b)?, Polynomial::new(self.poly.iter().map(|&v| to_c(v)).collect()))
    }

    pub fn to_theta(&self) -> Result<ThetaFunction> {
        let main = self.main()?;
        let tail = self.tail.to_tail(main.type_b())?;
        ThetaFunction::new(main, tail)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed function JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// `{"profile": "N1", "modes": {"1": 0.02}}`: cosine coefficients of u for
/// `N1`, sine coefficients of v for `N0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub profile: Profile,
    pub modes: BTreeMap<usize, f64>,
}

impl SeriesSpec {
    pub fn pairs(&self) -> Vec<(usize, f64)> {
        self.modes.iter().map(|(&k, &a)| (k, a)).collect()
    }
}

pub fn read_series(path: &Path) -> Result<SeriesSpec> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(io_err)?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("malformed series JSON: {e}")))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(e.to_string())
}

pub fn read_function(path: &Path) -> Result<ThetaFunction> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(io_err)?;
    FunctionSpec::from_json(&text)?.to_theta()
}

pub fn write_function(path: &Path, theta: &ThetaFunction) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "{}", FunctionSpec::from_theta(theta)?.to_json()).map_err(io_err)
}

pub fn read_tail(path: &Path, b: f64) -> Result<FourierTail> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(io_err)?;
    let spec: TailSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("malformed tail JSON: {e}")))?;
    spec.to_tail(b)
}

pub fn write_tail(path: &Path, tail: &FourierTail) -> Result<()> {
    let mut f = create(path)?;
    let text = serde_json::to_string_pretty(&TailSpec::from_tail(tail)).expect("plain data serializes");
    writeln!(f, "{text}").map_err(io_err)
}

/// Float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV writer over any sink, with a header row.
pub fn csv_writer<W: Write>(sink: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header).map_err(io_err)?;
    Ok(w)
}

pub const ZEROS_HEADER: [&str; 7] = ["n", "re_z", "im_z", "re_z0", "im_z0", "re_kappa", "im_kappa"];

pub fn write_zeros<W: Write>(sink: W, zeros: &ZeroSequence) -> Result<()> {
    let mut w = csv_writer(sink, &ZEROS_HEADER)?;
    let kappa = zeros.residuals().kappa;
    for ((n, z), (z0, k)) in zeros.iter().zip(zeros.lattice_points().iter().zip(kappa)) {
        w.write_record([n.to_string(), fmt_f64(z.re), fmt_f64(z.im), fmt_f64(z0.re), fmt_f64(z0.im), fmt_f64(k.re), fmt_f64(k.im)])
            .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn parse_f(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::InvalidInput(format!("not a number: {s:?}")))
}

/// Reads the `n, re_z, im_z, ...` table; the lattice columns are ignored
/// and rebuilt from `main`. Indices must be consecutive.
pub fn read_zeros<R: Read>(source: R, main: &MainPart) -> Result<ZeroSequence> {
    let mut r = csv::Reader::from_reader(source);
    let mut first = None;
    let mut zs = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io_err)?;
        if rec.len() < 3 {
            return Err(Error::InvalidInput(format!("zeros row needs n, re, im: {rec:?}")));
        }
        let n: i64 = rec[0].trim().parse().map_err(|_| Error::InvalidInput(format!("bad index {:?}", &rec[0])))?;
        let start = *first.get_or_insert(n);
        if n != start + zs.len() as i64 {
            return Err(Error::InvalidInput(format!("index {n} breaks the consecutive order")));
        }
        zs.push(C64::new(parse_f(&rec[1])?, parse_f(&rec[2])?));
    }
    let first = first.ok_or_else(|| Error::InvalidInput("no zeros in file".into()))?;
    ZeroSequence::with_first(main, first, zs)
}

pub fn write_spectrum<W: Write>(sink: W, spec: &Spectrum) -> Result<()> {
    let mut w = csv_writer(sink, &["n", "re_lambda", "im_lambda"])?;
    for (i, l) in spec.eigenvalues.iter().enumerate() {
        w.write_record([(i + 1).to_string(), fmt_f64(l.re), fmt_f64(l.im)]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads `n, re, im` rows with n = 1, 2, … in order.
pub fn read_spectrum<R: Read>(source: R) -> Result<Spectrum> {
    let mut r = csv::Reader::from_reader(source);
    let mut eigenvalues = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io_err)?;
        if rec.len() < 3 {
            return Err(Error::InvalidInput(format!("spectrum row needs n, re, im: {rec:?}")));
        }
        if rec[0].trim() != (eigenvalues.len() + 1).to_string() {
            return Err(Error::InvalidInput(format!("expected eigenvalue index {}, got {:?}", eigenvalues.len() + 1, &rec[0])));
        }
        eigenvalues.push(C64::new(parse_f(&rec[1])?, parse_f(&rec[2])?));
    }
    Ok(Spectrum { eigenvalues })
}

pub fn read_zeros_file(path: &Path, main: &MainPart) -> Result<ZeroSequence> {
    read_zeros(open(path)?, main)
}

pub fn write_zeros_file(path: &Path, zeros: &ZeroSequence) -> Result<()> {
    write_zeros(create(path)?, zeros)
}

pub fn read_spectrum_file(path: &Path) -> Result<Spectrum> {
    read_spectrum(open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const FIXTURE: &str = r#"{"base": {"kind": "sin", "b": 3.141592653589793},
        "poly": [[0.0, 0.0], [1.0, 0.0]],
        "tail": {"M": 2, "modes": {"1": [0.05, 0.0], "-2": [0.01, -0.02]}}}"#;

    #[test]
    fn parses_function_json() {
        let spec = FunctionSpec::from_json(FIXTURE).unwrap();
        let theta = spec.to_theta().unwrap();
        assert_eq!(theta.main().degree(), 1);
        assert_eq!(theta.tail().cutoff(), 2);
        assert_eq!(theta.tail().coeff(-2), C64::new(0.01, -0.02));
        assert_eq!(FunctionSpec::from_theta(&theta).unwrap(), spec);
        let again = FunctionSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn rejects_malformed_json() {
        for bad in [
            "{",
            r#"{"base": {"kind": "cos", "b": 1.0}, "poly": [[1.0, 0.0]], "tail": {"M": 0, "modes": {}}}"#,
            r#"{"base": {"kind": "sin", "b": 1.0}, "poly": [[1.0]], "tail": {"M": 0, "modes": {}}}"#,
            r#"{"base": {"kind": "sin", "b": 1.0}, "poly": [[1.0, 0.0]], "tail": {"M": 0, "modes": {"x": [1.0, 0.0]}}}"#,
        ] {
            assert!(matches!(FunctionSpec::from_json(bad), Err(Error::InvalidInput(_))), "{bad}");
        }
        let out_of_range = r#"{"base": {"kind": "sin", "b": 1.0}, "poly": [[1.0, 0.0]], "tail": {"M": 1, "modes": {"3": [1.0, 0.0]}}}"#;
        assert!(FunctionSpec::from_json(out_of_range).unwrap().to_theta().is_err());
        let no_poly = r#"{"base": {"kind": "sin", "b": 1.0}, "poly": [], "tail": {"M": 0, "modes": {}}}"#;
        assert!(FunctionSpec::from_json(no_poly).unwrap().to_theta().is_err());
    }

    #[test]
    fn zeros_table_layout() {
        let main = MainPart::monomial_sin(PI, 1).unwrap();
        let zs = ZeroSequence::lattice(&main, 3);
        let mut buf = Vec::new();
        write_zeros(&mut buf, &zs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,re_z,im_z,re_z0,im_z0,re_kappa,im_kappa");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("2,1.0000000000000000e0,"));
        assert!(matches!(read_zeros("n,re_z,im_z\n1,0,0\n3,1,0\n".as_bytes(), &main), Err(Error::InvalidInput(_))));
        assert!(matches!(read_zeros("n,re_z,im_z\n1,zero,0\n".as_bytes(), &main), Err(Error::InvalidInput(_))));
    }

    proptest! {
        #[test]
        fn zeros_round_trip_bitwise(kappa in prop::collection::vec((-1e3f64..1e3, -1e-9f64..1e-9), 1..30)) {
            let main = MainPart::monomial_sin(2.0, 1).unwrap();
            let k: Vec<C64> = kappa.iter().map(|&(a, b)| C64::new(a * 1e-4, b)).collect();
            let zs = ZeroSequence::from_kappa(&main, 0, &k).unwrap();
            let mut buf = Vec::new();
            write_zeros(&mut buf, &zs).unwrap();
            let back = read_zeros(buf.as_slice(), &main).unwrap();
            prop_assert_eq!(back, zs);
        }

        #[test]
        fn spectrum_round_trip_bitwise(vals in prop::collection::vec((any::<f64>(), -1e6f64..1e6), 0..20)) {
            let spec = Spectrum { eigenvalues: vals.iter().filter(|(a, _)| a.is_finite()).map(|&(a, b)| C64::new(a, b)).collect() };
            let mut buf = Vec::new();
            write_spectrum(&mut buf, &spec).unwrap();
            prop_assert_eq!(read_spectrum(buf.as_slice()).unwrap(), spec);
        }
    }

    #[test]
    fn series_json() {
        let s: SeriesSpec = serde_json::from_str(r#"{"profile": "N0", "modes": {"2": 0.5}}"#).unwrap();
        assert_eq!(s.profile, Profile::N0);
        assert_eq!(s.pairs(), vec![(2, 0.5)]);
        assert!(serde_json::from_str::<SeriesSpec>(r#"{"profile": "N2", "modes": {}}"#).is_err());
    }

    #[test]
    fn tail_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("sinetype-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let tail = FourierTail::from_modes(PI, 3, [(3, C64::new(0.1, 1.0 / 3.0)), (-1, C64::new(-0.2, 0.0))]).unwrap();
        let path = dir.join("tail.json");
        write_tail(&path, &tail).unwrap();
        assert_eq!(read_tail(&path, PI).unwrap(), tail);
        assert!(matches!(read_tail(&dir.join("missing.json"), PI), Err(Error::InvalidInput(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
