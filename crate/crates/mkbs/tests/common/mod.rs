#![allow(dead_code)]

use std::path::{Path, PathBuf};

use mkbs::service::wire::{SessionView, SubmitAnswer};
use mkbs::{KbStore, Service, ServiceConfig};
use tempfile::TempDir;

pub fn kb_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("kb")
}

pub fn flu_path() -> PathBuf {
    kb_dir().join("flu.mkb")
}

pub fn flu_source() -> String {
    std::fs::read_to_string(flu_path()).unwrap()
}

/// The flu answers as (attribute, cf).
pub const FLU_ANSWERS: [(&str, f64); 4] =
    [("fever", 0.9), ("cough", 0.8), ("night_sweats", 0.0), ("sore_throat", 0.4)];

pub fn flu_cf(attribute: &str) -> Option<f64> {
    FLU_ANSWERS.iter().find(|(a, _)| *a == attribute).map(|(_, cf)| *cf)
}

/// A private copy of the flu KB on disk.
pub fn flu_copy() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flu.mkb");
    std::fs::copy(flu_path(), &path).unwrap();
    (dir, path)
}

pub fn flu_service() -> Service {
    let mut svc = Service::new(ServiceConfig::default());
    let kb = mkbs_core::parse_kb(&flu_source()).unwrap();
    svc.add_kb("flu", KbStore::in_memory(kb));
    svc
}

/// Answers every question from `FLU_ANSWERS` until the session is done.
pub fn replay(svc: &Service, mut view: SessionView) -> (SessionView, Vec<String>) {
    let mut asked = Vec::new();
    while let Some(q) = view.question.clone() {
        asked.push(q.attribute.clone());
        let cf = flu_cf(&q.attribute).unwrap_or_else(|| panic!("unexpected question {}", q.attribute));
        view = svc
            .submit_answer(&view.session_id, &SubmitAnswer { question_id: q.question_id, cf, value: None })
            .unwrap();
    }
    (view, asked)
}

pub fn ranking(view: &SessionView) -> Vec<(String, f64)> {
    view.result.as_ref().unwrap().ranked.iter().map(|r| (r.value.clone(), r.cf)).collect()
}
