//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p mkbs --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use mkbs::service::http::router;
use mkbs::service::wire::SubmitAnswer;
use mkbs::{EditError, KbStore, Service, ServiceConfig};
use mkbs_core::{
    cf_all, cf_any, cf_parallel, cf_rule, consult, parse_kb, parse_rule, serialize_kb, validate_kb,
    AVPair, Answer, CertaintyFactor, ConsultationResult, EngineConfig, KnowledgeBase, NodeKind,
    Question, SemanticNet, Triple,
};
use mkbs_testkit::{
    brute_force_cf, closure_distances, random_engine_kb, random_net, random_syntax_kb, EngineKbShape,
    RandomScript, ENGINE_GOAL,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use tower::ServiceExt;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const CRITERIA: &[(&str, Check)] = &[
    ("rule combination: cf = rule_cf x premise_cf", rule_combination),
    ("combinator algebra", combinator_algebra),
    ("golden flu scenario (CLI and protocol)", golden_flu),
    ("ask-once invariant", ask_once),
    ("oracle equivalence at threshold 0", oracle_equivalence),
    ("pruning monotonicity", pruning_monotonicity),
    ("parser round-trip and disease KB", parser_round_trip),
    ("semantic net closure and inheritance", semantic_net),
    ("editor atomicity and snapshot isolation", editor_isolation),
    ("service replay determinism", replay_determinism),
];

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in CRITERIA {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) if took <= Duration::from_secs(5) => {
                println!("PASS  {name}: {detail} [{:.2}s]", took.as_secs_f64());
            }
            Ok(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}, but took {:.2}s (limit 5s)", took.as_secs_f64());
            }
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{:.2}s]", took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

fn cf(v: f64) -> CertaintyFactor {
    CertaintyFactor::new(v).unwrap()
}

fn unit(rng: &mut StdRng) -> CertaintyFactor {
    match rng.random_range(0..20) {
        0 => CertaintyFactor::FALSE,
        1 => CertaintyFactor::TRUE,
        _ => cf(rng.random::<f64>()),
    }
}

fn config(threshold: f64) -> EngineConfig {
    EngineConfig { report_threshold: Some(CertaintyFactor::FALSE), ..EngineConfig::with_threshold(cf(threshold)) }
}

/// Random consultation, with every question the provider saw.
fn random_run(rng: &mut StdRng, threshold: f64) -> (KnowledgeBase, RandomScript, ConsultationResult, Vec<AVPair>) {
    let kb = random_engine_kb(rng, EngineKbShape::default());
    let script = RandomScript::generate(rng, &kb);
    let (result, seen) = run_script(&kb, &script, threshold);
    (kb, script, result, seen)
}

fn run_script(kb: &KnowledgeBase, script: &RandomScript, threshold: f64) -> (ConsultationResult, Vec<AVPair>) {
    let mut seen = Vec::new();
    let mut inner = script.clone();
    let mut provider = |q: &Question| {
        seen.push(q.avpair.clone());
        mkbs_core::AnswerProvider::answer(&mut inner, q)
    };
    let result = consult(kb, ENGINE_GOAL, &mut provider, config(threshold)).expect("consultation");
    (result, seen)
}

fn rule_combination() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..1000 {
        let (r, p) = (unit(&mut rng), unit(&mut rng));
        let got = cf_rule(r, p).value();
        ensure!(got.to_bits() == (r.value() * p.value()).to_bits(), "cf_rule({r}, {p}) = {got}");
    }
    let mut rule_nodes = 0;
    for _ in 0..300 {
        let threshold = rng.random_range(0..=5) as f64 / 10.0;
        let (_, _, result, _) = random_run(&mut rng, threshold);
        for c in &result.ranked {
            for node in c.trace.walk().filter(|n| n.kind == NodeKind::Rule) {
                let eval = node.rule.as_ref().ok_or("rule node without rule_cf/premise_cf")?;
                ensure!(
                    node.cf.value().to_bits() == (eval.rule_cf.value() * eval.premise_cf.value()).to_bits(),
                    "rule node {} has cf {} != {} x {}",
                    node.label, node.cf, eval.rule_cf, eval.premise_cf
                );
                rule_nodes += 1;
            }
        }
    }
    let flu = flu_result(EngineConfig::default());
    let r1 = flu.ranked[0].trace.walk().find(|n| n.kind == NodeKind::Rule).ok_or("no r1 node")?;
    let eval = r1.rule.as_ref().unwrap();
    ensure!(
        (eval.rule_cf.value(), eval.premise_cf.value(), r1.cf.value()) == (0.7, 0.8, 0.7 * 0.8),
        "flu r1 node shows {} x {} = {}",
        eval.rule_cf, eval.premise_cf, r1.cf
    );
    Ok(format!("1000 pairs exact; {rule_nodes} rule nodes checked"))
}

fn combinator_algebra() -> Result<String, String> {
    const CASES: usize = 10_000;
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..CASES {
        let n = rng.random_range(1..6);
        let xs: Vec<CertaintyFactor> = (0..n).map(|_| unit(&mut rng)).collect();
        let (all, any) = (cf_all(&xs), cf_any(&xs));
        ensure!(xs.iter().all(|x| all <= *x && *x <= any), "bounds fail for {xs:?}");
        ensure!(xs.contains(&all) && xs.contains(&any), "all/any not attained for {xs:?}");
        let i = rng.random_range(0..n);
        let mut raised = xs.clone();
        raised[i] = cf(rng.random_range(xs[i].value()..=1.0));
        ensure!(cf_all(&raised) >= all && cf_any(&raised) >= any, "not monotone: {xs:?} -> {raised:?}");

        let (a, b, c) = (unit(&mut rng), unit(&mut rng), unit(&mut rng));
        let ab = cf_parallel(a, b).value();
        ensure!((ab - cf_parallel(b, a).value()).abs() <= 1e-12, "parallel not commutative at {a}, {b}");
        let left = cf_parallel(cf_parallel(a, b), c).value();
        let right = cf_parallel(a, cf_parallel(b, c)).value();
        ensure!((left - right).abs() <= 1e-12, "parallel not associative at {a}, {b}, {c}");
        ensure!(cf_parallel(a, CertaintyFactor::FALSE) == a && cf_parallel(CertaintyFactor::FALSE, a) == a, "0 is not an identity at {a}");
        ensure!(
            cf_parallel(a, CertaintyFactor::TRUE) == CertaintyFactor::TRUE && cf_parallel(CertaintyFactor::TRUE, a) == CertaintyFactor::TRUE,
            "1 is not absorbing at {a}"
        );
        ensure!((0.0..=1.0).contains(&ab) && ab >= a.value().max(b.value()) - 1e-15, "parallel out of bounds at {a}, {b}");
    }
    Ok(format!("{CASES} cases"))
}

fn flu_kb() -> KnowledgeBase {
    parse_kb(&common::flu_source()).unwrap()
}

fn flu_result(config: EngineConfig) -> ConsultationResult {
    let mut provider = |q: &Question| -> Result<Answer, String> {
        common::flu_cf(&q.avpair.attribute).map(|v| Answer::with_cf(cf(v))).ok_or_else(|| q.avpair.to_string())
    };
    consult(&flu_kb(), "diagnosis", &mut provider, config).unwrap()
}

fn block_on<F: std::future::Future>(f: F) -> F::Output {
    tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap().block_on(f)
}

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> (u16, String) {
    let body = body.map_or_else(Body::empty, |v| Body::from(v.to_string()));
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json").body(body).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status().as_u16();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

/// Replays the flu answers over HTTP. Returns (report lines, trace bytes, attributes asked).
fn protocol_replay(svc: Arc<Service>) -> (String, String, Vec<String>) {
    let app = router(svc);
    block_on(async move {
        let (status, body) = call(&app, Method::POST, "/kbs/flu/sessions", Some(json!({"goal": "diagnosis"}))).await;
        assert_eq!(status, 201, "{body}");
        let mut view: Value = serde_json::from_str(&body).unwrap();
        let id = view["session_id"].as_str().unwrap().to_owned();
        let mut asked = Vec::new();
        while view["state"] == "awaiting_answer" {
            let q = &view["question"];
            let attr = q["attribute"].as_str().unwrap().to_owned();
            let cf = common::flu_cf(&attr).unwrap();
            asked.push(attr);
            let (status, body) =
                call(&app, Method::POST, &format!("/sessions/{id}/answers"), Some(json!({"question_id": q["question_id"], "cf": cf}))).await;
            assert_eq!(status, 200, "{body}");
            view = serde_json::from_str(&body).unwrap();
        }
        let report: String = view["result"]["ranked"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| format!("{} {:.2}\n", r["value"].as_str().unwrap(), r["cf"].as_f64().unwrap()))
            .collect();
        let (status, trace) = call(&app, Method::GET, &format!("/sessions/{id}/trace"), None).await;
        assert_eq!(status, 200);
        (report, trace, asked)
    })
}

fn golden_flu() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let trace_path = dir.path().join("trace.json");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = mkbs::cli::cmd_consult(
        &common::flu_path(),
        "diagnosis",
        Some(&common::kb_dir().join("flu.answers")),
        EngineConfig::default(),
        Some(&trace_path),
        &mut std::io::empty(),
        &mut out,
        &mut err,
    );
    let cli_report = String::from_utf8(out).unwrap();
    ensure!(code == 0, "cmd_consult exited {code}: {}", String::from_utf8_lossy(&err));
    ensure!(cli_report == "flu 0.56\ncommon_cold 0.40\n", "cmd_consult printed {cli_report:?}");
    let cli_trace = std::fs::read_to_string(&trace_path).map_err(|e| e.to_string())?;

    let result = flu_result(EngineConfig::default());
    let asked: Vec<&str> = result.questions_asked.iter().map(|p| p.attribute.as_str()).collect();
    ensure!(!asked.contains(&"weight_loss"), "weight_loss was asked");
    ensure!(asked.iter().filter(|a| **a == "cough").count() == 1, "cough asked {:?}", asked);
    ensure!(result.ranked.iter().all(|c| c.value.text() != "tb"), "tb was reported");
    let everything = flu_result(config(0.2));
    let tb = everything.ranked.iter().find(|c| c.value.text() == "tb").ok_or("tb not proven")?;
    ensure!(tb.cf == CertaintyFactor::FALSE, "tb cf {}", tb.cf);
    ensure!(tb.trace.walk().any(|n| n.kind == NodeKind::Pruned), "tb trace has no pruned node");

    let (wire_report, wire_trace, wire_asked) = protocol_replay(Arc::new(common::flu_service()));
    ensure!(wire_report == cli_report, "protocol ranking {wire_report:?} != CLI {cli_report:?}");
    ensure!(wire_trace == cli_trace, "protocol trace differs from CLI trace");
    ensure!(wire_asked == ["fever", "cough", "night_sweats", "sore_throat"], "protocol asked {wire_asked:?}");
    Ok("flu 0.56, common_cold 0.40; tb pruned; weight_loss never asked; cough once; CLI == protocol".into())
}

fn ask_once() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(4);
    let mut questions = 0;
    for i in 0..500 {
        let threshold = rng.random_range(0..=4) as f64 / 10.0;
        let (kb, _, result, seen) = random_run(&mut rng, threshold);
        let distinct: BTreeSet<_> = seen.iter().collect();
        ensure!(distinct.len() == seen.len(), "KB #{i} asked a pair twice: {seen:?}\n{}", serialize_kb(&kb));
        let logged: BTreeSet<_> = result.questions_asked.iter().collect();
        ensure!(logged.len() == result.questions_asked.len(), "KB #{i} logs a pair twice");
        questions += seen.len();
    }
    Ok(format!("500 KBs, {questions} questions, none repeated"))
}

fn oracle_equivalence() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(5);
    let mut compared = 0;
    for i in 0..500 {
        let (kb, script, result, _) = random_run(&mut rng, 0.0);
        for value in kb.candidate_values(ENGINE_GOAL) {
            let pair = AVPair::new(ENGINE_GOAL, value.clone());
            let expected = brute_force_cf(&kb, &pair, &script);
            let got = result.ranked.iter().find(|c| c.value == value).map_or(0.0, |c| c.cf.value());
            ensure!((got - expected).abs() <= 1e-12, "KB #{i}: {pair} engine {got} oracle {expected}\n{}", serialize_kb(&kb));
            compared += 1;
        }
    }
    Ok(format!("500 KBs, {compared} goal values within 1e-12"))
}

fn pruning_monotonicity() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(6);
    for i in 0..500 {
        let kb = random_engine_kb(&mut rng, EngineKbShape::default());
        let script = RandomScript::generate(&mut rng, &kb);
        let t1 = rng.random_range(0..=9) as f64 / 10.0;
        let t2 = rng.random_range(((t1 * 10.0) as u32 + 1)..=10) as f64 / 10.0;
        let (low, _) = run_script(&kb, &script, t1);
        let (high, _) = run_script(&kb, &script, t2);
        let asked_low: BTreeSet<_> = low.questions_asked.iter().collect();
        ensure!(
            high.questions_asked.iter().all(|q| asked_low.contains(q)),
            "KB #{i}: t={t2} asked outside t={t1}\n{}", serialize_kb(&kb)
        );
        for c in &high.ranked {
            let before = low.ranked.iter().find(|l| l.value == c.value).map_or(0.0, |l| l.cf.value());
            ensure!(c.cf.value() <= before, "KB #{i}: {} rose from {before} to {} (t {t1} -> {t2})", c.value, c.cf);
        }
    }
    Ok("500 KBs with random t1 < t2".into())
}

const TABLE_NAMES: [&str; 26] = [
    "cancer", "anxiety_disorders", "balding_and_hair_loss", "thyroid_disorders", "heart_attack",
    "diabetes", "asthma", "erectile_disorders", "migraine", "heart_disease", "allergies",
    "prostate_conditions", "lupus", "skin_disorders", "chest_pain", "cohns_disease",
    "abdominal_pain", "eye_disorders", "respiratory_problem", "common_cold", "anxiety",
    "impotence", "headache", "diarrhea", "tonsil", "speech_problem",
];

fn parser_round_trip() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(7);
    for i in 0..1000 {
        let kb = random_syntax_kb(&mut rng);
        let text = serialize_kb(&kb);
        let back = parse_kb(&text).map_err(|d| format!("KB #{i} failed to reparse: {d:?}\n{text}"))?;
        ensure!(back == kb, "KB #{i} changed in round trip\n{text}");
        ensure!(serialize_kb(&back) == text, "KB #{i} serializes differently the second time");
    }

    let source = std::fs::read_to_string(common::kb_dir().join("diseases.mkb")).map_err(|e| e.to_string())?;
    let kb = parse_kb(&source).map_err(|d| format!("disease KB has errors: {d:?}"))?;
    let diags = validate_kb(&kb);
    ensure!(diags.is_empty(), "disease KB diagnostics: {diags:?}");
    let mut names: BTreeSet<&str> = kb.rules.iter().map(|r| r.conclusion.value.text()).collect();
    names.extend(kb.triples.iter().flat_map(|t| [t.subject.as_str(), t.object.as_str()]));
    let missing: Vec<&str> = TABLE_NAMES.iter().copied().filter(|n| !names.contains(n)).collect();
    ensure!(missing.is_empty(), "disease KB lacks {missing:?}");
    ensure!(parse_kb(&serialize_kb(&kb)).as_ref() == Ok(&kb), "disease KB does not round-trip");
    Ok(format!("1000 generated KBs; disease KB clean with all {} listed names", TABLE_NAMES.len()))
}

fn isa_edges(triples: &[Triple]) -> Vec<(String, String)> {
    triples.iter().filter(|t| t.relation == "isa").map(|t| (t.subject.clone(), t.object.clone())).collect()
}

fn semantic_net() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(8);
    for i in 0..200 {
        let (nodes, triples) = random_net(&mut rng, 50);
        let net = SemanticNet::new(triples.clone());
        let up = closure_distances(&nodes, &isa_edges(&triples));
        for node in &nodes {
            let ancestors = net.ancestors(node);
            let want: BTreeSet<&String> = up.keys().filter(|(a, _)| a == node).map(|(_, b)| b).collect();
            ensure!(ancestors.iter().collect::<BTreeSet<_>>() == want && ancestors.len() == want.len(), "net #{i}: ancestors({node})");
            let d: Vec<usize> = ancestors.iter().map(|a| up[&(node.clone(), a.clone())]).collect();
            ensure!(d.windows(2).all(|w| w[0] <= w[1]), "net #{i}: ancestors({node}) not breadth-first");

            let subtypes = net.subtypes(node);
            let want: BTreeSet<&String> = up.keys().filter(|(_, b)| b == node).map(|(a, _)| a).collect();
            ensure!(subtypes.iter().collect::<BTreeSet<_>>() == want && subtypes.len() == want.len(), "net #{i}: subtypes({node})");
            let d: Vec<usize> = subtypes.iter().map(|s| up[&(s.clone(), node.clone())]).collect();
            ensure!(d.windows(2).all(|w| w[0] <= w[1]), "net #{i}: subtypes({node}) not breadth-first");

            for relation in ["treatment", "symptom"] {
                let holders = |n: &String| -> BTreeSet<String> {
                    triples.iter().filter(|t| t.relation == relation && &t.subject == n).map(|t| t.object.clone()).collect()
                };
                let mut want = holders(node);
                let direct: BTreeSet<String> = net.query(relation, node, false).objects().map(String::from).collect();
                ensure!(direct == want, "net #{i}: direct {relation}({node})");
                for (a, b) in up.keys() {
                    if a == node {
                        want.extend(holders(b));
                    }
                }
                let got: Vec<String> = net.query(relation, node, true).objects().map(String::from).collect();
                ensure!(got.len() == want.len() && got.into_iter().collect::<BTreeSet<_>>() == want, "net #{i}: inherited {relation}({node})");
            }
        }
    }

    let kb = parse_kb(&std::fs::read_to_string(common::kb_dir().join("diseases.mkb")).unwrap()).unwrap();
    let answer = SemanticNet::from_kb(&kb).query("treatment", "mesothelioma", true);
    let got: Vec<(&str, Option<&str>)> = answer.results.iter().map(|r| (r.object.as_str(), r.via.as_deref())).collect();
    let want: Vec<(&str, Option<&str>)> = ["surgery", "radio_therapy", "chemotherapy", "hormonal_therapy"]
        .into_iter()
        .map(|t| (t, Some("lung_cancer")))
        .collect();
    ensure!(got == want, "mesothelioma treatments: {got:?}");
    Ok("200 random DAGs match the closure oracle; mesothelioma inherits 4 treatments".into())
}

fn replay_flu(svc: &Service) -> (u64, f64, String) {
    let (view, _) = common::replay(svc, svc.create_session("flu", "diagnosis").unwrap());
    let top = view.result.as_ref().unwrap().ranked[0].cf;
    (view.revision, top, svc.get_trace(&view.session_id).unwrap())
}

fn editor_isolation() -> Result<String, String> {
    let (_dir, path) = common::flu_copy();
    let mut svc = Service::new(ServiceConfig::default());
    svc.add_kb("flu", KbStore::open(&path).map_err(|e| e.to_string())?);
    let store = svc.store("flu").unwrap().clone();
    let bytes = |p: &Path| std::fs::read(p).unwrap();
    let original = bytes(&path);

    let rejected: Vec<(&str, Result<mkbs::Edit, EditError>)> = vec![
        ("duplicate id", store.add_rule(parse_rule("rule r1: if cough = yes then diagnosis = flu cf 0.2 .").unwrap())),
        ("premise cycle", store.add_rule(parse_rule("rule r9: if diagnosis = flu then fever = yes cf 0.5 .").unwrap())),
        ("self conclusion", store.update_rule("r1", parse_rule("rule r1: if fever = yes and cough = yes then fever = yes cf 0.7 .").unwrap())),
        ("missing id", store.delete_rule("r42")),
    ];
    for (what, outcome) in &rejected {
        ensure!(outcome.is_err(), "{what} was accepted");
        ensure!(bytes(&path) == original, "{what} changed the file");
        ensure!(store.revision() == 1, "{what} bumped the revision");
    }

    // one session starts before the edit and finishes after it
    let early = svc.create_session("flu", "diagnosis").map_err(|e| e.to_string())?;
    let q = early.question.clone().unwrap();
    let early = svc
        .submit_answer(&early.session_id, &SubmitAnswer { question_id: q.question_id, cf: 0.9, value: None })
        .map_err(|e| e.to_string())?;
    let edit = svc
        .update_rule("flu", "r1", "rule r1: if fever = yes and cough = yes then diagnosis = flu cf 0.9 .")
        .map_err(|e| e.to_string())?;
    ensure!(edit.revision == 2, "edit produced revision {}", edit.revision);
    let (old, _) = common::replay(&svc, early);
    let (new_rev, new_top, _) = replay_flu(&svc);
    let old_top = old.result.as_ref().unwrap().ranked[0].cf;
    ensure!(old.revision == 1 && old_top == 0.56, "pre-edit session: revision {} flu {old_top}", old.revision);
    ensure!(new_rev == 2 && new_top == 0.72, "post-edit session: revision {new_rev} flu {new_top}");
    ensure!(
        mkbs::kbfile::load_kb(&path).map_err(|e| e.to_string())?.kb == *store.snapshot().kb,
        "file does not match the published snapshot"
    );
    Ok("4 rejected edits left file and revision intact; pre-edit 0.56, post-edit 0.72".into())
}

fn replay_determinism() -> Result<String, String> {
    let (_, _, a) = replay_flu(&common::flu_service());
    let (_, _, b) = replay_flu(&common::flu_service());
    ensure!(a == b, "flu traces differ between runs");
    let shared = common::flu_service();
    let (_, _, c) = replay_flu(&shared);
    let (_, _, d) = replay_flu(&shared);
    ensure!(a == c && c == d, "flu traces differ between sessions of one service");
    let (_, http_a, _) = protocol_replay(Arc::new(common::flu_service()));
    let (_, http_b, _) = protocol_replay(Arc::new(common::flu_service()));
    ensure!(http_a == http_b && http_a == a, "HTTP traces differ");

    let mut rng = StdRng::seed_from_u64(10);
    for i in 0..100 {
        let kb = random_engine_kb(&mut rng, EngineKbShape::default());
        let script = RandomScript::generate(&mut rng, &kb);
        let run = || -> String {
            let mut svc = Service::new(ServiceConfig::default());
            svc.add_kb("k", KbStore::in_memory(kb.clone()));
            let mut view = svc.create_session("k", ENGINE_GOAL).unwrap();
            while let Some(q) = view.question.clone() {
                let pick = q.menu.as_ref().and(script.choices.get(&q.attribute));
                let (cf, value) = match pick {
                    Some((v, cf)) => (*cf, Some(v.text().to_owned())),
                    None => (script.pairs.get(&AVPair::ident(&q.attribute, &q.value)).copied().unwrap_or(0.0), None),
                };
                view = svc.submit_answer(&view.session_id, &SubmitAnswer { question_id: q.question_id, cf, value }).unwrap();
            }
            svc.get_trace(&view.session_id).unwrap()
        };
        ensure!(run() == run(), "random KB #{i}: traces differ between runs\n{}", serialize_kb(&kb));
    }
    Ok(format!("flu trace identical across 6 runs ({} bytes); 100 random KBs replayed twice", a.len()))
}
