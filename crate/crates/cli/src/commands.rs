use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use threshold_lab::classify::{classify_enumeration, classify_game, ClassificationRecord, ClassifyOptions, CountReport};
use threshold_lab::conjecture::{conjecture_scan, ScanTarget};
use threshold_lab::document::{ExplicitDocument, GameDocument, PlayerWeights};
use threshold_lab::enumeration::EnumFilter;
use threshold_lab::families::FamilySpec;
use threshold_lab::formulas::{formula_check, Formula, ALL_FORMULAS};
use threshold_lab::game::{SwapCertificate, TrivialPlayers};
use threshold_lab::trades::{expand_vectorial, Certificate, TradeSearcher};
use threshold_lab::weightedness::{decide_weighted, format_ratio, mp_parameters, MpWitness};
use threshold_lab::{CharacteristicInvariants, Error, PlayerPartition, TradeMode, WeightedRepresentation};

use crate::{EnumModeArg, ModeArg, TargetForm};

// stdout may be a closed pipe (`| head`); output errors are not failures
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Debug)]
pub struct CliError(pub String);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(e.to_string())
    }
}

pub enum Outcome {
    Verdict,
    /// Non-weighted game without a certificate up to the length cap.
    Inconclusive,
}

type CliResult = Result<Outcome, CliError>;

fn load(path: &Path) -> Result<GameDocument, CliError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    }
    Ok(GameDocument::parse(&text)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    out!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn mode_of(m: ModeArg) -> TradeMode {
    match m {
        ModeArg::Trade => TradeMode::Trade,
        ModeArg::Invariant => TradeMode::Invariant,
    }
}

fn player_weights(rep: &WeightedRepresentation, partition: &PlayerPartition) -> Vec<u64> {
    let n = partition.classes.iter().map(Vec::len).sum();
    let mut w = vec![0; n];
    for (class, &cw) in partition.classes.iter().zip(&rep.class_weights) {
        for &p in class {
            w[p] = cw;
        }
    }
    w
}

#[derive(Serialize)]
struct MpReport {
    m: String,
    p: String,
    mp: String,
    m_witness: Option<MpWitness>,
    p_witness: Option<MpWitness>,
}

fn mp_report(ci: &CharacteristicInvariants) -> Option<MpReport> {
    let mp = mp_parameters(ci).ok()?;
    Some(MpReport {
        m: format_ratio(&mp.m),
        p: format_ratio(&mp.p),
        mp: format_ratio(&mp.product()),
        m_witness: mp.m_witness.clone(),
        p_witness: mp.p_witness.clone(),
    })
}

#[derive(Serialize)]
struct Analysis {
    form: &'static str,
    n: usize,
    complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    swap_certificate: Option<SwapCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariants: Option<CharacteristicInvariants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<Vec<usize>>>,
    /// shift-maximal losing types
    #[serde(rename = "Y", skip_serializing_if = "Option::is_none")]
    y: Option<Vec<Vec<u32>>>,
    trivial_players: TrivialPlayers,
    weighted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    representation: Option<WeightedRepresentation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    player_weights: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mp: Option<MpReport>,
}

fn trivial_from_invariants(ci: &CharacteristicInvariants, partition: &PlayerPartition) -> TrivialPlayers {
    let mut vetoers = Vec::new();
    let mut nulls = Vec::new();
    if ci.has_veto_class() {
        vetoers = partition.classes[0].clone();
    }
    if ci.has_null_class() {
        nulls = partition.classes[ci.t() - 1].clone();
    }
    vetoers.sort_unstable();
    nulls.sort_unstable();
    TrivialPlayers { vetoers, nulls }
}

fn analysis(doc: &GameDocument) -> Result<Analysis, CliError> {
    let (ci, partition, trivial) = match doc {
        GameDocument::Invariants(ci) => {
            let partition = ci.partition();
            let trivial = trivial_from_invariants(ci, &partition);
            (ci.clone(), partition, trivial)
        }
        other => {
            let game = other.to_game()?;
            let trivial = game.trivial_players();
            match threshold_lab::invariants::extract_invariants(&game) {
                Ok((ci, partition)) => (ci, partition, trivial),
                Err(Error::NotComplete) => {
                    return Ok(Analysis {
                        form: doc.kind(),
                        n: game.n(),
                        complete: false,
                        swap_certificate: game.swap_certificate(),
                        t: None,
                        r: None,
                        invariants: None,
                        partition: None,
                        y: None,
                        trivial_players: trivial,
                        weighted: false,
                        representation: None,
                        player_weights: None,
                        mp: None,
                    })
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    let rep = decide_weighted(&ci);
    Ok(Analysis {
        form: doc.kind(),
        n: ci.n(),
        complete: true,
        swap_certificate: None,
        t: Some(ci.t()),
        r: Some(ci.r()),
        y: Some(ci.shift_maximal_losing_types()),
        partition: Some(partition.classes.clone()),
        trivial_players: trivial,
        weighted: rep.is_some(),
        player_weights: rep.as_ref().map(|r| player_weights(r, &partition)),
        representation: rep,
        mp: if ci.t() == 2 { mp_report(&ci) } else { None },
        invariants: Some(ci),
    })
}

fn rows_text(rows: &[Vec<u32>]) -> String {
    rows.iter()
        .map(|r| format!("({})", r.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn analyze(path: &Path, pretty: bool) -> CliResult {
    let doc = load(path)?;
    let a = analysis(&doc)?;
    if !pretty {
        print_json(&a)?;
        return Ok(Outcome::Verdict);
    }
    out!("players: {} ({} document)", a.n, a.form);
    if let Some(c) = &a.swap_certificate {
        out!("complete: no; players {} and {} are incomparable", c.i, c.j);
        out!("  {:?} and {:?} win, swapping gives {:?} and {:?}", c.x1, c.x2, c.y1(), c.y2());
        return Ok(Outcome::Verdict);
    }
    let ci = a.invariants.as_ref().unwrap();
    out!("complete: yes, t = {}, r = {}", ci.t(), ci.r());
    out!("classes: {:?}", ci.classes());
    out!("shift-minimal winning types: {}", rows_text(ci.rows()));
    out!("shift-maximal losing types: {}", rows_text(a.y.as_deref().unwrap_or(&[])));
    out!("vetoers: {:?}, null players: {:?}", a.trivial_players.vetoers, a.trivial_players.nulls);
    match &a.representation {
        Some(rep) => out!("weighted: yes, quota {} class weights {:?}", rep.quota, rep.class_weights),
        None => out!("weighted: no"),
    }
    if let Some(mp) = &a.mp {
        out!("M = {}, P = {}, MP = {}", mp.m, mp.p, mp.mp);
    }
    Ok(Outcome::Verdict)
}

pub fn certify(path: &Path, mode: ModeArg, max_k: usize, expand: bool, pretty: bool) -> CliResult {
    let doc = load(path)?;
    let mode = mode_of(mode);
    if max_k < 2 {
        return Err(CliError("--max-k must be at least 2".into()));
    }
    let (ci, partition) = match doc.to_invariants() {
        Ok(x) => x,
        Err(Error::NotComplete) => {
            let game = doc.to_game()?;
            let cert = game.swap_certificate().ok_or_else(|| CliError("no swap certificate".into()))?;
            if pretty {
                out!("not complete: players {} and {} are incomparable", cert.i, cert.j);
            } else {
                print_json(&json!({ "verdict": "not_complete", "swap_certificate": cert }))?;
            }
            return Ok(Outcome::Verdict);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(rep) = decide_weighted(&ci) {
        let weights = player_weights(&rep, &partition);
        if pretty {
            out!("weighted: quota {} class weights {:?}", rep.quota, rep.class_weights);
            out!("player weights: {weights:?}");
        } else {
            print_json(&json!({ "verdict": "weighted", "representation": rep, "player_weights": weights }))?;
        }
        return Ok(Outcome::Verdict);
    }
    let report = TradeSearcher::new(&ci).find(mode, max_k);
    let Some(trade) = report.certificate() else {
        if pretty {
            out!("not weighted; inconclusive at cap: no {mode} certificate of length <= {max_k}");
        } else {
            print_json(&json!({ "verdict": "inconclusive", "status": "inconclusive at cap", "mode": mode, "max_k": max_k }))?;
        }
        return Ok(Outcome::Inconclusive);
    };
    let cert = Certificate::new(mode, trade);
    let transform = if expand { Some(expand_vectorial(trade, &partition)?) } else { None };
    if pretty {
        out!("not weighted: {mode} certificate of length {}", cert.k);
        out!("  {trade}");
        if let Some(t) = &transform {
            for (x, y) in t.pre.iter().zip(&t.post) {
                out!("  {x:?} -> {y:?}");
            }
        }
    } else {
        let mut out = json!({ "verdict": "not_weighted", "certificate": cert });
        if let Some(t) = transform {
            out["transform"] = serde_json::to_value(t)?;
        }
        print_json(&out)?;
    }
    Ok(Outcome::Verdict)
}

pub struct EnumerateRequest {
    pub n: String,
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub cap_k: usize,
    pub escalate_to: usize,
    pub mode: EnumModeArg,
    pub records: Option<PathBuf>,
    pub csv: Option<String>,
}

fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError(format!("--n expects N or A..B, got '{s}'"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a == 0 || a > b || b > 64 {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn enumerate(req: &EnumerateRequest, pretty: bool) -> CliResult {
    let (lo, hi) = parse_range(&req.n)?;
    if req.cap_k < 2 {
        return Err(CliError("--cap-k must be at least 2".into()));
    }
    let opts = ClassifyOptions {
        cap_k: req.cap_k,
        escalate_to: req.escalate_to,
        trade: req.mode != EnumModeArg::Invariant,
        invariant: req.mode != EnumModeArg::Trade,
    };
    let filter = EnumFilter { t: req.t, r: req.r };
    let mut records = match &req.records {
        Some(p) => Some(BufWriter::new(File::create(p).map_err(|e| CliError(format!("{}: {e}", p.display())))?)),
        None => None,
    };
    let mut write_error: Option<io::Error> = None;
    let mut reports = Vec::new();
    for n in lo..=hi {
        let mut sink = |rec: &ClassificationRecord| {
            if let (Some(w), None) = (records.as_mut(), &write_error) {
                let line = serde_json::to_string(rec).expect("records serialize");
                if let Err(e) = writeln!(w, "{line}") {
                    write_error = Some(e);
                }
            }
        };
        let sink: Option<&mut dyn FnMut(&ClassificationRecord)> =
            if req.records.is_some() { Some(&mut sink) } else { None };
        reports.push(classify_enumeration(n, filter, &opts, sink));
    }
    if let Some(e) = write_error {
        return Err(e.into());
    }
    if let Some(mut w) = records {
        w.flush()?;
    }
    let csv_mode = if req.mode == EnumModeArg::Invariant { TradeMode::Invariant } else { TradeMode::Trade };
    match req.csv.as_deref() {
        Some("-") => write_csv(io::stdout().lock(), &reports, csv_mode)?,
        Some(path) => {
            write_csv(File::create(path).map_err(|e| CliError(format!("{path}: {e}")))?, &reports, csv_mode)?;
            emit_reports(&reports, pretty)?;
        }
        None => emit_reports(&reports, pretty)?,
    }
    if reports.iter().any(|r| r.unresolved > 0) {
        Ok(Outcome::Inconclusive)
    } else {
        Ok(Outcome::Verdict)
    }
}

fn write_csv<W: Write>(out: W, reports: &[CountReport], mode: TradeMode) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CountReport::csv_header(reports, mode))?;
    for row in CountReport::csv_rows(reports, mode) {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit_reports(reports: &[CountReport], pretty: bool) -> Result<(), CliError> {
    if !pretty {
        return print_json(&reports);
    }
    for r in reports {
        let fails = |m: &BTreeMap<usize, u64>| {
            m.iter().map(|(k, v)| format!("k={k}: {v}")).collect::<Vec<_>>().join(", ")
        };
        out!("n = {}: {} complete, {} weighted", r.n, r.total, r.weighted);
        if !r.trade_fails.is_empty() {
            out!("  first trade failure  {}", fails(&r.trade_fails));
        }
        if !r.invariant_fails.is_empty() {
            out!("  first invariant failure  {}", fails(&r.invariant_fails));
        }
        if r.unresolved > 0 {
            out!("  unresolved: {}", r.unresolved);
        }
    }
    Ok(())
}

pub fn formulas(check: Option<&str>, n_min: u32, n_max: u32, pretty: bool) -> CliResult {
    let which: Vec<Formula> = match check {
        Some(name) => vec![name.parse().map_err(CliError)?],
        None => ALL_FORMULAS.to_vec(),
    };
    if n_min == 0 || n_min > n_max || n_max > 20 {
        return Err(CliError(format!("need 1 <= n-min <= n-max <= 20, got {n_min}..{n_max}")));
    }
    let reports: Vec<_> = which.into_iter().map(|f| formula_check(f, n_min, n_max)).collect();
    if pretty {
        for rep in &reports {
            out!("{}: {}", rep.which, if rep.all_match { "all match" } else { "MISMATCH" });
            for row in &rep.rows {
                out!("  n={:>2} formula {:>8} enumerated {:>8}", row.n, row.formula, row.enumerated);
            }
        }
    } else {
        print_json(&reports)?;
    }
    Ok(Outcome::Verdict)
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, u32>, CliError> {
    let mut map = BTreeMap::new();
    for p in params.iter().filter(|p| !p.is_empty()) {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError(format!("parameter '{p}' is not key=value")))?;
        let v = v
            .trim()
            .parse()
            .map_err(|_| CliError(format!("parameter '{k}' needs a non-negative integer, got '{v}'")))?;
        map.insert(k.trim().to_string(), v);
    }
    Ok(map)
}

pub fn family(name: &str, params: &[String], lift: Option<ModeArg>, analyze: bool, pretty: bool) -> CliResult {
    let mut spec = FamilySpec::parse(name, &parse_params(params)?)?;
    if let Some(mode) = lift {
        spec = FamilySpec::Lift { base: Box::new(spec), mode: mode_of(mode) };
    }
    let ci = spec.generate()?;
    if !analyze {
        if pretty {
            out!("{spec}: classes {:?}, rows {}", ci.classes(), rows_text(ci.rows()));
        } else {
            print_json(&ci)?;
        }
        return Ok(Outcome::Verdict);
    }
    let rec = classify_game(&ci, &ClassifyOptions::default());
    if pretty {
        out!("{spec}: classes {:?}, rows {}", ci.classes(), rows_text(ci.rows()));
        if rec.weighted {
            out!("  weighted");
        } else {
            out!(
                "  not weighted; first trade failure {:?}, first invariant failure {:?}",
                rec.k_trade_fail, rec.k_invariant_fail
            );
        }
    } else {
        print_json(&json!({ "family": spec.to_string(), "record": rec }))?;
    }
    Ok(if rec.unresolved { Outcome::Inconclusive } else { Outcome::Verdict })
}

pub fn convert(path: &Path, to: TargetForm, per_player: bool, pretty: bool) -> CliResult {
    let doc = load(path)?;
    let out: Value = match to {
        TargetForm::Explicit => serde_json::to_value(ExplicitDocument::from_game(&doc.to_game()?))?,
        TargetForm::Invariants => serde_json::to_value(doc.to_invariants()?.0)?,
        TargetForm::Weighted => {
            let (ci, partition) = doc.to_invariants()?;
            let rep = decide_weighted(&ci).ok_or_else(|| CliError("game is not weighted".into()))?;
            if per_player {
                let weights = match &doc {
                    GameDocument::WeightedPlayers(pw) => pw.weights.clone(),
                    _ => player_weights(&rep, &partition),
                };
                let quota = match &doc {
                    GameDocument::WeightedPlayers(pw) => pw.quota,
                    _ => rep.quota,
                };
                serde_json::to_value(PlayerWeights { quota, weights })?
            } else {
                serde_json::to_value(rep)?
            }
        }
    };
    if pretty {
        out!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        out!("{}", serde_json::to_string(&out)?);
    }
    Ok(Outcome::Verdict)
}

pub fn conjecture(target: &str, n_min: u32, n_max: u32, pretty: bool) -> CliResult {
    let target: ScanTarget = target.parse().map_err(CliError)?;
    if n_min == 0 || n_min > n_max || n_max > 20 {
        return Err(CliError(format!("need 1 <= n-min <= n-max <= 20, got {n_min}..{n_max}")));
    }
    let report = conjecture_scan(target, n_min, n_max);
    if pretty {
        out!(
            "{target} for n = {n_min}..{n_max}: {} games, {} counterexamples",
            report.games_checked,
            report.counterexamples.len()
        );
        for c in &report.counterexamples {
            out!("  {:?} {}: {}", c.invariants.classes(), rows_text(c.invariants.rows()), c.reason);
        }
    } else {
        print_json(&report)?;
    }
    Ok(Outcome::Verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("7").unwrap(), (7, 7));
        assert_eq!(parse_range("4..11").unwrap(), (4, 11));
        assert!(parse_range("0").is_err());
        assert!(parse_range("6..4").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn params() {
        let p = parse_params(&["k1=2".into(), "l = 1".into()]).unwrap();
        assert_eq!(p.get("k1"), Some(&2));
        assert_eq!(p.get("l "), None);
        assert!(parse_params(&["m".into()]).is_err());
        assert!(parse_params(&["m=-1".into()]).is_err());
    }
}
