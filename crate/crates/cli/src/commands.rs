use std::path::Path;

use hc_core::contact_homology::{
    build_hc_complex, check_degree_shift, d_squared_guard, default_m_o, hc_ranks_chain,
    hc_ranks_closed_form_window, DegreeWindow, HCError, Target,
};
use hc_core::handle_dynamics::{enumerate_orbits, equal_action_groups, ActionCutoff, HandleError};
use hc_core::morse_complex::{homology_ranks, MorseData, MorseError};
use hc_core::rational::format_rational;
use hc_core::symplectic_index::{
    classify_return_map, is_good, reduced_index, rs_index_blocks, rs_index_numeric, BlockGenerator,
    BlockPath, IndexError, IndexValue, DEFAULT_KERNEL_TOL,
};
use hc_core::word_combinatorics::{verify_word_lemma, WordError, WordLemmaMode};

use crate::document::{parse_cutoff, InputDocument};
use crate::exit::{Failure, BUDGET, CHECK_FAILED, DEGENERATE_LEVEL, INVALID_DATA, OK, PARSE};
use crate::report::{Cell, Report};

/// A finished report and the exit code it implies.
pub struct Outcome {
    pub report: Report,
    pub code: u8,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, code: OK }
    }
}

fn index_cell(v: IndexValue) -> Cell {
    match v.as_integer() {
        Some(i) => Cell::Int(i),
        None => Cell::Text(v.to_string()),
    }
}

fn morse_failure(e: MorseError) -> Failure {
    Failure::new(INVALID_DATA, e.to_string())
}

fn hc_failure(e: HCError) -> Failure {
    match e {
        HCError::Morse(m) => morse_failure(m),
        HCError::BoundarySquareNonzero { .. } => Failure::new(CHECK_FAILED, e.to_string()),
        HCError::InvalidCutoff => Failure::new(PARSE, e.to_string()),
    }
}

fn index_failure(e: IndexError) -> Failure {
    match e {
        IndexError::NonRegularCrossing { .. } | IndexError::NotSymplectic { .. } => {
            Failure::new(INVALID_DATA, e.to_string())
        }
        IndexError::InvalidPath(_) => Failure::new(PARSE, e.to_string()),
    }
}

pub struct IndexArgs {
    pub rotations: Vec<f64>,
    pub hyperbolic: Vec<(f64, f64)>,
    pub identity: usize,
    pub duration: f64,
    pub multiplicity: u64,
}

pub fn index(args: &IndexArgs) -> Result<Outcome, Failure> {
    let mut blocks = Vec::new();
    for &w in &args.rotations {
        blocks.push(BlockGenerator::rotation(w).map_err(index_failure)?);
    }
    for &(a, b) in &args.hyperbolic {
        blocks.push(BlockGenerator::hyperbolic(a, b).map_err(index_failure)?);
    }
    blocks.extend(std::iter::repeat_n(BlockGenerator::ConstantIdentity, args.identity));
    if blocks.is_empty() {
        return Err(Failure::new(PARSE, "give at least one --rotation, --hyperbolic or --identity block"));
    }
    let path = BlockPath::new(blocks, args.duration).map_err(index_failure)?;
    let mu = rs_index_numeric(&path.clone().into(), DEFAULT_KERNEL_TOL).map_err(index_failure)?;
    let n = path.blocks().len();
    let class = classify_return_map(&path);
    let eigenvalues = class
        .eigenvalues
        .iter()
        .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
        .collect::<Vec<_>>()
        .join(" ");

    let mut r = Report::new(
        "index",
        vec!["mu", "mu_closed_form", "reduced", "degenerate", "n_gamma", "good", "eigenvalues"],
    );
    r.meta("T", args.duration).meta("n", n).meta("multiplicity", args.multiplicity);
    r.row(vec![
        index_cell(mu),
        index_cell(rs_index_blocks(&path)),
        index_cell(reduced_index(mu, n)),
        class.degenerate.into(),
        class.n_gamma.into(),
        is_good(class.n_gamma, args.multiplicity).into(),
        eigenvalues.into(),
    ]);
    r.summary = format!("mu = {mu}, reduced = {}", reduced_index(mu, n));
    Ok(r.into())
}

fn record_seed(r: &mut Report, doc: &InputDocument) {
    if let Some(seed) = doc.options.seed {
        r.meta("seed", seed);
    }
}

fn load(path: &Path) -> anyhow::Result<(InputDocument, MorseData)> {
    let doc = InputDocument::load(path)?;
    doc.check_handle_keys()?;
    let d = doc.morse_data()?;
    Ok((doc, d))
}

pub fn orbits(path: &Path, handle: &str, cutoff: Option<&str>) -> anyhow::Result<Outcome> {
    let (doc, _) = load(path)?;
    let h = doc.handle(handle)?;
    let cutoff: ActionCutoff = match cutoff {
        Some(s) => parse_cutoff(s)?,
        None => doc
            .action_cutoff()?
            .ok_or_else(|| Failure::new(PARSE, "no --cutoff given and the document sets no action_cutoff"))?,
    };
    let list = enumerate_orbits(&h, &cutoff).map_err(|e| match e {
        HandleError::DegenerateLevel(_) => Failure::new(DEGENERATE_LEVEL, e.to_string()),
        other => Failure::new(INVALID_DATA, other.to_string()),
    })?;
    let mut tied = vec![false; list.len()];
    for group in equal_action_groups(&list) {
        for i in group {
            tied[i] = true;
        }
    }

    let mut r = Report::new(
        "orbits",
        vec![
            "l",
            "m",
            "period_over_pi",
            "period",
            "action_over_pi",
            "action",
            "mu",
            "reduced",
            "nondegenerate",
            "good",
            "equal_action",
        ],
    );
    record_seed(&mut r, &doc);
    r.meta("handle", handle).meta("k", h.k()).meta("cutoff", cutoff.to_string());
    for (o, tie) in list.iter().zip(&tied) {
        r.row(vec![
            o.l.into(),
            o.m.into(),
            format_rational(&o.period_over_pi).into(),
            o.hamiltonian_period.into(),
            format_rational(&o.action_over_pi).into(),
            o.action.into(),
            index_cell(o.mu),
            index_cell(o.reduced),
            o.nondegenerate.into(),
            o.good.into(),
            (*tie).into(),
        ]);
    }
    let ties = tied.iter().filter(|&&t| t).count();
    r.summary = format!("{} orbits, {ties} with a shared action", list.len());
    Ok(r.into())
}

pub fn homology(path: &Path) -> anyhow::Result<Outcome> {
    let (doc, d) = load(path)?;
    let betti = homology_ranks(&d).map_err(morse_failure)?;
    let top = d.max_index().unwrap_or(0) as i64;
    let mut r = Report::new("homology", vec!["degree", "critical_points", "betti"]);
    record_seed(&mut r, &doc);
    r.meta("n", d.n).meta("euler_characteristic", betti.euler_characteristic());
    let chains = d.chain_ranks();
    for j in 0..=top {
        r.row(vec![j.into(), chains.get(j).into(), betti.get(j).into()]);
    }
    r.summary = format!(
        "Betti numbers: {}",
        (0..=top).map(|j| betti.get(j).to_string()).collect::<Vec<_>>().join(", ")
    );
    Ok(r.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Chain,
    Closed,
    Both,
}

fn resolve_window(doc: &InputDocument, flag: Option<DegreeWindow>) -> DegreeWindow {
    flag.or_else(|| doc.window()).unwrap_or(DegreeWindow::new(0, 20))
}

pub fn hc(
    path: &Path,
    target: Target,
    route: Route,
    window: Option<DegreeWindow>,
    m_o: Option<u64>,
) -> anyhow::Result<Outcome> {
    let (doc, d) = load(path)?;
    d.validate().map_err(morse_failure)?;
    let window = resolve_window(&doc, window);
    let saturating = default_m_o(window.hi);
    let m_o = m_o.or(doc.options.m_o).unwrap_or(saturating);

    let chain = if route != Route::Closed {
        let cx = build_hc_complex(&d, m_o, window, target).map_err(hc_failure)?;
        let warnings = d_squared_guard(&cx);
        Some((hc_ranks_chain(&cx).map_err(hc_failure)?, warnings))
    } else {
        None
    };
    let closed = if route != Route::Chain {
        Some(hc_ranks_closed_form_window(&d, window, target, Some(m_o)).map_err(hc_failure)?)
    } else {
        None
    };

    let mut columns = vec!["degree"];
    if chain.is_some() {
        columns.push("rank_chain");
    }
    if closed.is_some() {
        columns.push("rank_closed");
    }
    if route == Route::Both {
        columns.push("agree");
    }
    let mut r = Report::new("hc", columns);
    record_seed(&mut r, &doc);
    r.meta("target", target.to_string())
        .meta("window", format!("{}:{}", window.lo, window.hi))
        .meta("m_o", m_o)
        .meta("saturated", m_o >= saturating);
    if let Some((_, warnings)) = &chain {
        let guard = if warnings.is_empty() {
            "ok".to_string()
        } else {
            warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("; ")
        };
        r.meta("d_squared_guard", guard);
    }
    let mut disagreements = 0;
    if !window.is_empty() {
        for deg in window.degrees() {
            let mut row: Vec<Cell> = vec![deg.into()];
            let a = chain.as_ref().map(|(g, _)| g.get(deg));
            let b = closed.as_ref().map(|g| g.get(deg));
            row.extend(a.map(Cell::from));
            row.extend(b.map(Cell::from));
            if let (Some(a), Some(b)) = (a, b) {
                row.push((a == b).into());
                disagreements += usize::from(a != b);
            }
            r.row(row);
        }
    }
    r.summary = match route {
        Route::Both if disagreements > 0 => format!("routes disagree in {disagreements} degree(s)"),
        Route::Both => "routes agree".into(),
        _ => format!("{} degree(s)", r.rows.len()),
    };
    let code = if disagreements > 0 { CHECK_FAILED } else { OK };
    Ok(Outcome { report: r, code })
}

pub fn shift(path: &Path, window: Option<DegreeWindow>) -> anyhow::Result<Outcome> {
    let (doc, d) = load(path)?;
    let window = resolve_window(&doc, window);
    let report = check_degree_shift(&d, window).map_err(hc_failure)?;
    let mut r = Report::new("shift", vec!["degree", "rank_M", "rank_Mprime_plus_2", "match"]);
    record_seed(&mut r, &doc);
    r.meta("window", format!("{}:{}", window.lo, window.hi));
    for row in &report.rows {
        r.row(vec![
            row.degree.into(),
            row.rank_m.into(),
            row.rank_m_prime_shifted.into(),
            row.matches().into(),
        ]);
    }
    let bad = report.mismatches().count();
    r.summary = if bad == 0 {
        format!("all {} degree(s) match", report.rows.len())
    } else {
        format!("{bad} mismatch(es)")
    };
    Ok(Outcome {
        report: r,
        code: if bad == 0 { OK } else { CHECK_FAILED },
    })
}

pub fn words(n: u32, mode: WordLemmaMode) -> Result<Outcome, Failure> {
    let report = verify_word_lemma(n, mode).map_err(|e| match e {
        WordError::BudgetExceeded { .. } => Failure::new(BUDGET, format!("{e}; raise --cap or use --mode randomized")),
        other => Failure::new(PARSE, other.to_string()),
    })?;
    let mut r = Report::new("words", vec!["n", "word_length", "mode", "words_checked", "counterexamples"]);
    let mode_name = match mode {
        WordLemmaMode::Exhaustive { cap } => {
            r.meta("cap", cap);
            "exhaustive"
        }
        WordLemmaMode::Randomized { samples, seed } => {
            r.meta("seed", seed).meta("samples", samples);
            "randomized"
        }
    };
    let examples = report.counterexamples.iter().map(|w| w.to_string()).collect::<Vec<_>>();
    r.meta("counterexample_list", examples.join(" "));
    r.row(vec![
        i64::from(n).into(),
        report.word_length.into(),
        mode_name.into(),
        report.words_checked.into(),
        report.counterexamples.len().into(),
    ]);
    r.summary = format!("{} words, {} counterexamples", report.words_checked, report.counterexamples.len());
    let code = if report.counterexamples.is_empty() { OK } else { CHECK_FAILED };
    Ok(Outcome { report: r, code })
}
