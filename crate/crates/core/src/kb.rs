//! Append-only knowledge base shared by the manager tiers.
//!
//! Every run gets its own log. Events inside a log are kept totally ordered
//! by `(tick, kind, service)`; appends with equal keys keep arrival order.
//! Exports are only allowed once a run has been closed, so they always see a
//! complete log.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::arm::TraceRow;
use crate::domain::{ResourcePlan, ScaleAction};
use crate::error::{Error, Result};
use crate::sim::ServiceSample;

/// Column order of the CSV export.
pub const CSV_HEADER: [&str; 12] = [
    "time", "service", "cmv", "cr", "dr", "max_r", "sd", "res_sd", "res_dr", "supply", "demand", "capacity",
];

/// What a microservice manager stores after each evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub name: String,
    pub dr: u32,
    pub sd: ScaleAction,
    pub cmv: f64,
    pub tmv: f64,
    pub cr: u32,
    pub min_r: u32,
    pub max_r: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Verdict,
    ArmTrace,
    Plan,
    Snapshot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum KbPayload {
    Verdict(VerdictRecord),
    ArmTrace(TraceRow),
    Plan(ResourcePlan),
    Snapshot(ServiceSample),
}

impl KbPayload {
    pub fn kind(&self) -> EventKind {
        match self {
            KbPayload::Verdict(_) => EventKind::Verdict,
            KbPayload::ArmTrace(_) => EventKind::ArmTrace,
            KbPayload::Plan(_) => EventKind::Plan,
            KbPayload::Snapshot(_) => EventKind::Snapshot,
        }
    }

    pub fn service(&self) -> &str {
        match self {
            KbPayload::Verdict(v) => &v.name,
            KbPayload::ArmTrace(t) => &t.name,
            KbPayload::Plan(p) => &p.name,
            KbPayload::Snapshot(s) => &s.name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KbEvent {
    pub run_id: String,
    pub tick: u64,
    #[serde(flatten)]
    pub payload: KbPayload,
}

impl KbEvent {
    pub fn new(run_id: impl Into<String>, tick: u64, payload: KbPayload) -> Self {
        KbEvent {
            run_id: run_id.into(),
            tick,
            payload,
        }
    }

    fn sort_key(&self) -> (u64, EventKind, &str) {
        (self.tick, self.payload.kind(), self.payload.service())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    JsonLines,
}

#[derive(Default)]
struct RunLog {
    events: Vec<KbEvent>,
    closed: bool,
}

/// In-memory event store, optionally mirrored to a newline-delimited file.
#[derive(Default)]
pub struct KnowledgeBase {
    runs: Mutex<BTreeMap<String, RunLog>>,
    mirror: Option<Mutex<BufWriter<File>>>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mirrors every appended event as one JSON line to `path`.
    pub fn file_backed(path: impl AsRef<Path>) -> Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(KnowledgeBase {
            runs: Mutex::default(),
            mirror: Some(Mutex::new(BufWriter::new(file))),
        })
    }

    pub fn register_run(&self, run_id: &str) -> Result<()> {
        let mut runs = self.runs.lock().unwrap();
        if runs.contains_key(run_id) {
            return Err(Error::RunExists(run_id.to_string()));
        }
        runs.insert(run_id.to_string(), RunLog::default());
        Ok(())
    }

    pub fn close_run(&self, run_id: &str) -> Result<()> {
        let mut runs = self.runs.lock().unwrap();
        let log = runs.get_mut(run_id).ok_or_else(|| Error::UnknownRun(run_id.to_string()))?;
        log.closed = true;
        drop(runs);
        if let Some(mirror) = &self.mirror {
            mirror.lock().unwrap().flush()?;
        }
        Ok(())
    }

    pub fn append(&self, event: KbEvent) -> Result<()> {
        let mut runs = self.runs.lock().unwrap();
        let log = runs
            .get_mut(&event.run_id)
            .ok_or_else(|| Error::UnknownRun(event.run_id.clone()))?;
        if log.closed {
            return Err(Error::RunClosed(event.run_id));
        }
        if let Some(mirror) = &self.mirror {
            let mut w = mirror.lock().unwrap();
            serde_json::to_writer(&mut *w, &event)?;
            w.write_all(b"\n")?;
        }
        let key = event.sort_key();
        let at = log.events.partition_point(|e| e.sort_key() <= key);
        log.events.insert(at, event);
        Ok(())
    }

    /// All events of `run_id` at `tick`, in log order.
    pub fn query(&self, run_id: &str, tick: u64) -> Result<Vec<KbEvent>> {
        let runs = self.runs.lock().unwrap();
        let log = runs.get(run_id).ok_or_else(|| Error::UnknownRun(run_id.to_string()))?;
        let start = log.events.partition_point(|e| e.tick < tick);
        Ok(log.events[start..]
            .iter()
            .take_while(|e| e.tick == tick)
            .cloned()
            .collect())
    }

    pub fn events(&self, run_id: &str) -> Result<Vec<KbEvent>> {
        let runs = self.runs.lock().unwrap();
        let log = runs.get(run_id).ok_or_else(|| Error::UnknownRun(run_id.to_string()))?;
        Ok(log.events.clone())
    }

    pub fn len(&self, run_id: &str) -> Result<usize> {
        let runs = self.runs.lock().unwrap();
        let log = runs.get(run_id).ok_or_else(|| Error::UnknownRun(run_id.to_string()))?;
        Ok(log.events.len())
    }

    /// Serializes a closed run. CSV carries snapshot rows only; JSON lines
    /// carries every event.
    pub fn export(&self, run_id: &str, format: ExportFormat) -> Result<Vec<u8>> {
        let runs = self.runs.lock().unwrap();
        let log = runs.get(run_id).ok_or_else(|| Error::UnknownRun(run_id.to_string()))?;
        if !log.closed {
            return Err(Error::RunOpen(run_id.to_string()));
        }
        match format {
            ExportFormat::Csv => export_csv(&log.events),
            ExportFormat::JsonLines => {
                let mut out = Vec::new();
                for event in &log.events {
                    serde_json::to_writer(&mut out, event)?;
                    out.push(b'\n');
                }
                Ok(out)
            }
        }
    }
}

fn export_csv(events: &[KbEvent]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for event in events {
        let KbPayload::Snapshot(s) = &event.payload else {
            continue;
        };
        w.write_record([
            event.tick.to_string(),
            s.name.clone(),
            format!("{:.2}", s.cmv),
            s.cr.to_string(),
            s.dr.to_string(),
            s.max_r.to_string(),
            s.sd.to_string(),
            s.res_sd.to_string(),
            s.res_dr.to_string(),
            s.supply.get().to_string(),
            s.demand.get().to_string(),
            s.capacity.get().to_string(),
        ])?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Sink the manager tiers write their records into.
pub trait Recorder: Sync {
    fn record(&self, payload: KbPayload) -> Result<()>;

    /// Stamps subsequent records with `tick`.
    fn set_tick(&self, _tick: u64) {}
}

/// Discards everything.
pub struct NullRecorder;

impl Recorder for NullRecorder {
    fn record(&self, _payload: KbPayload) -> Result<()> {
        Ok(())
    }
}

/// Writes into one run of a [`KnowledgeBase`], stamping events with the
/// current simulation tick.
pub struct RunRecorder<'a> {
    kb: &'a KnowledgeBase,
    run_id: String,
    tick: AtomicU64,
}

impl<'a> RunRecorder<'a> {
    pub fn new(kb: &'a KnowledgeBase, run_id: impl Into<String>) -> Self {
        RunRecorder {
            kb,
            run_id: run_id.into(),
            tick: AtomicU64::new(0),
        }
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }
}

impl Recorder for RunRecorder<'_> {
    fn record(&self, payload: KbPayload) -> Result<()> {
        let tick = self.tick.load(Ordering::Relaxed);
        self.kb.append(KbEvent::new(self.run_id.clone(), tick, payload))
    }

    fn set_tick(&self, tick: u64) {
        self.tick.store(tick, Ordering::Relaxed);
    }
}
