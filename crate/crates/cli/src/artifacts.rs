//! CSV and JSON artifacts written by `run` and read back by `report`.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use noisy_vqe::optimize::{OptimizationTrace, TraceRecord};
use noisy_vqe::experiment::SweepRow;
use serde::Serialize;

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const METADATA_JSON: &str = "metadata.json";
pub const TRACE_CSV: &str = "trace.csv";
pub const RECALC_CSV: &str = "recalc.csv";
pub const BAKEOFF_CSV: &str = "bakeoff.csv";
pub const CIRCUIT_JSON: &str = "circuit.json";

pub type IoResult<T> = Result<T, String>;

fn ctx<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

/// Owns the output directory; every artifact goes through here.
pub struct ArtifactWriter {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn create(root: &Path) -> IoResult<Self> {
        fs::create_dir_all(root).map_err(ctx(root))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn open(&mut self, rel: &Path) -> IoResult<(PathBuf, BufWriter<fs::File>)> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(ctx(dir))?;
        }
        let f = fs::File::create(&path).map_err(ctx(&path))?;
        self.written.push(path.clone());
        Ok((path, BufWriter::new(f)))
    }

    pub fn json<T: Serialize>(&mut self, rel: impl AsRef<Path>, value: &T) -> IoResult<()> {
        let (path, mut w) = self.open(rel.as_ref())?;
        serde_json::to_writer_pretty(&mut w, value).map_err(ctx(&path))?;
        writeln!(w).and_then(|_| w.flush()).map_err(ctx(&path))
    }

    pub fn text(&mut self, rel: impl AsRef<Path>, body: &str) -> IoResult<()> {
        let (path, mut w) = self.open(rel.as_ref())?;
        w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(ctx(&path))
    }

    pub fn trace(&mut self, rel: impl AsRef<Path>, trace: &OptimizationTrace) -> IoResult<()> {
        let (path, mut w) = self.open(rel.as_ref())?;
        trace.write_csv(&mut w).and_then(|_| w.flush()).map_err(ctx(&path))
    }

    pub fn sweep_rows(&mut self, rows: &[SweepRow]) -> IoResult<()> {
        let (path, w) = self.open(Path::new(SWEEP_CSV))?;
        write_sweep_csv(w, rows).map_err(ctx(&path))
    }

    pub fn recalc(&mut self, rows: &[RecalcRow]) -> IoResult<()> {
        let (path, w) = self.open(Path::new(RECALC_CSV))?;
        write_rows(w, rows).map_err(ctx(&path))
    }

    pub fn csv_rows<T: Serialize>(&mut self, rel: impl AsRef<Path>, rows: &[T]) -> IoResult<()> {
        let (path, w) = self.open(rel.as_ref())?;
        write_rows(w, rows).map_err(ctx(&path))
    }
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Header `intensity,repetition,final_energy,params_0..params_k,seed,intensity_index,best_energy`.
pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> csv::Result<()> {
    let n = rows.first().map_or(0, |r| r.final_params.len());
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["intensity".to_string(), "repetition".into(), "final_energy".into()];
    header.extend((0..n).map(|j| format!("params_{j}")));
    header.extend(["seed".into(), "intensity_index".into(), "best_energy".into()]);
    out.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.intensity.to_string(), r.repetition.to_string(), r.final_energy.to_string()];
        rec.extend(r.final_params.iter().map(f64::to_string));
        rec.extend([r.seed.to_string(), r.intensity_index.to_string(), r.best_energy.to_string()]);
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_sweep_csv(path: &Path) -> IoResult<Vec<SweepRow>> {
    let f = fs::File::open(path).map_err(ctx(path))?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(f));
    let header = rdr.headers().map_err(ctx(path))?.clone();
    let n = header.iter().filter(|h| h.starts_with("params_")).count();
    if header.len() != n + 6 || &header[0] != "intensity" || &header[n + 3] != "seed" {
        return Err(format!("{}: not a sweep table (header {:?})", path.display(), header));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(ctx(path))?;
        let bad = |col: usize| format!("{}: row {}: bad {}", path.display(), i + 2, &header[col]);
        let f = |col: usize| rec[col].parse::<f64>().map_err(|_| bad(col));
        let u = |col: usize| rec[col].parse::<u64>().map_err(|_| bad(col));
        rows.push(SweepRow {
            intensity: f(0)?,
            repetition: u(1)? as usize,
            final_energy: f(2)?,
            final_params: (3..3 + n).map(f).collect::<IoResult<_>>()?,
            seed: u(n + 3)?,
            intensity_index: u(n + 4)? as usize,
            best_energy: f(n + 5)?,
            trace: None,
        });
    }
    Ok(rows)
}

pub fn read_trace_csv(path: &Path) -> IoResult<Vec<TraceRecord>> {
    let f = fs::File::open(path).map_err(ctx(path))?;
    OptimizationTrace::read_csv_records(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))
}

/// One optimizer record with its energy under the noisy backend and recomputed exactly.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RecalcRow {
    pub iteration: usize,
    pub recorded_energy: f64,
    pub exact_energy: f64,
}

pub fn read_recalc_csv(path: &Path) -> IoResult<Vec<RecalcRow>> {
    let f = fs::File::open(path).map_err(ctx(path))?;
    csv::Reader::from_reader(BufReader::new(f))
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(ctx(path))
}

/// Per-run outcome of an optimizer bake-off.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct BakeoffRow {
    pub optimizer: String,
    pub optimizer_index: usize,
    pub repetition: usize,
    pub seed: u64,
    pub final_energy: f64,
    pub best_energy: f64,
    pub total_evals: usize,
}
