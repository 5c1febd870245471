use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use amalgam::amalgam::{syllables_to_string, Amalgam, FactorContract, Side};
use amalgam::bass_serre::{build_ball, export_ball, ExportFormat};
use amalgam::finite::{builtin_spec, builtin_specs, closure_cap, AmalgamSpec, FiniteAmalgam};
use amalgam::gamma::{
    defining_relations, format_nf, gamma, in_gamma_prime, parse_word, theta_word, word_to_letters, Gamma,
    GammaElement,
};
use amalgam::invariants::{
    c_chain_truncated, c_jk_membership, classify_finite_h, conjugate_out, k0_truncated, k0k1_fixed_point,
    kernel_truncated, verify_conjugation, ConjugateOut, WitnessSearch, DEFAULT_SEARCH_BUDGET,
};
use amalgam::suite::{run_all, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "amalgam", version, about = "Exact computation in amalgamated free products")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GroupArgs {
    /// Builtin group: gamma, s3, sl2, direct or free.
    #[arg(long, default_value = "gamma", conflicts_with = "spec")]
    group: String,
    /// JSON amalgam spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normal form of a word.
    Reduce {
        #[command(flatten)]
        g: GroupArgs,
        word: String,
    },
    /// Normal form of a product of words.
    Mul {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Check every defining relator of gamma reduces to the identity.
    VerifyPresentation {
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
    /// K0, K1 and ker (exact for finite H, on a truncation for gamma).
    Kernel {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: usize,
    },
    /// Decide the finite-H criteria for a finite amalgam.
    Classify {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 6)]
        search_len: usize,
    },
    /// Members of C_{j,<=k} (on the truncation B_depth for gamma).
    CChain {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        side: usize,
        #[arg(long)]
        k: usize,
    },
    /// Find r with r^-1 f r outside H for every given f.
    ConjugateOut {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(required = true)]
        elements: Vec<String>,
    },
    /// The homomorphism theta of gamma on a word.
    Theta {
        #[arg(long)]
        word: String,
    },
    /// Export a ball of the Bass-Serre tree.
    Tree {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// dot or json
        #[arg(long, default_value = "dot")]
        format: String,
    },
    /// Run the acceptance suite.
    Selftest,
}

/// Errors in the invocation or its inputs; reported with exit code 2.
struct Failure(String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Report {
    passed: bool,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { passed: true, text, json }
    }
}

enum Backend {
    Gamma(Gamma),
    Finite(Box<FiniteAmalgam>),
}

fn resolve(g: &GroupArgs) -> Result<Backend, Failure> {
    if let Some(path) = &g.spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
        let mut spec = AmalgamSpec::from_json(&text)?;
        if spec.name.is_none() {
            spec.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        return Ok(Backend::Finite(Box::new(FiniteAmalgam::from_spec(&spec, closure_cap())?)));
    }
    match g.group.as_str() {
        "gamma" => Ok(Backend::Gamma(gamma())),
        id => match builtin_spec(id) {
            Some(spec) => Ok(Backend::Finite(Box::new(FiniteAmalgam::from_spec(&spec, closure_cap())?))),
            None => {
                let known: Vec<&str> = builtin_specs().iter().map(|(i, _, _)| *i).collect();
                Err(Failure(format!(
                    "unknown group {id:?}; expected gamma or one of {}",
                    known.join(", ")
                )))
            }
        },
    }
}

fn gamma_element(g: &Gamma, word: &str) -> Result<GammaElement, Failure> {
    Ok(g.normalize(&word_to_letters(&parse_word(word)?)))
}

fn element_json<H: serde::Serialize>(rendered: String, x: &amalgam::amalgam::NormalForm<H>) -> Value {
    json!({
        "normal_form": rendered,
        "syllables": syllables_to_string(&x.syllables),
        "tail": x.tail,
    })
}

fn product<C: FactorContract>(
    a: &Amalgam<C>,
    words: &[String],
    parse: impl Fn(&str) -> Result<amalgam::amalgam::Element<C>, Failure>,
) -> Result<amalgam::amalgam::Element<C>, Failure> {
    let mut x = a.identity();
    for w in words {
        x = a.mul(&x, &parse(w)?);
    }
    Ok(x)
}

fn reduce(g: &GroupArgs, words: &[String]) -> Result<Report, Failure> {
    let (text, value) = match resolve(g)? {
        Backend::Gamma(a) => {
            let x = product(&a, words, |w| gamma_element(&a, w))?;
            let s = format_nf(&x);
            (s.clone(), element_json(s, &x))
        }
        Backend::Finite(fin) => {
            let a = fin.clone().amalgam();
            let x = product(&a, words, |w| Ok(a.normalize(&fin.parse_word(w)?)))?;
            let s = fin.format_nf(&x);
            (s.clone(), element_json(s, &x))
        }
    };
    Ok(Report::ok(text, value))
}

fn verify_presentation(max_len: usize) -> Result<Report, Failure> {
    let g = gamma();
    let rels = defining_relations(max_len);
    let bad: Vec<String> = rels
        .iter()
        .filter(|r| !g.is_identity(&g.normalize(&word_to_letters(&r.word))))
        .map(ToString::to_string)
        .collect();
    let text = if bad.is_empty() {
        format!("{} relators with parameters of length <= {max_len}: all reduce to e", rels.len())
    } else {
        format!("{} of {} relators do not reduce to e:\n{}", bad.len(), rels.len(), bad.join("\n"))
    };
    Ok(Report {
        passed: bad.is_empty(),
        text,
        json: json!({ "max_len": max_len, "relators": rels.len(), "failures": bad }),
    })
}

fn labels(fin: &FiniteAmalgam, set: &[usize]) -> String {
    let l: Vec<String> = set.iter().map(|&k| fin.h_label(k)).collect();
    format!("{{{}}}", l.join(", "))
}

fn kernel(g: &GroupArgs, depth: usize, max_len: usize, budget: usize) -> Result<Report, Failure> {
    match resolve(g)? {
        Backend::Gamma(_) => {
            check_depth(depth)?;
            let k0 = k0_truncated(depth, max_len, budget)?;
            let ker = kernel_truncated(depth, max_len, budget)?;
            let total = 1usize << ((2 << depth) - 2);
            let strs = |v: &[amalgam::portrait::Portrait]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
            let lengths: Vec<String> = k0.exclusion_lengths.iter().map(|(l, n)| format!("{l}: {n}")).collect();
            let text = format!(
                "K0 ∩ B_{depth}: {} of {total} elements (search length >= {max_len}, undecided {})\n\
                 shortest excluding word lengths: {}\n\
                 ker ∩ B_{depth}: {{{}}}",
                k0.members.len(),
                k0.undecided.len(),
                if lengths.is_empty() { "none".to_string() } else { lengths.join(", ") },
                strs(&ker).join(", "),
            );
            Ok(Report {
                passed: k0.undecided.is_empty(),
                text,
                json: json!({
                    "group": "gamma",
                    "depth": depth,
                    "max_len": max_len,
                    "truncation_size": total,
                    "k0": strs(&k0.members),
                    "undecided": strs(&k0.undecided),
                    "late_exclusions": strs(&k0.late_exclusions),
                    "exclusion_lengths": k0.exclusion_lengths,
                    "ker": strs(&ker),
                }),
            })
        }
        Backend::Finite(fin) => {
            let r = k0k1_fixed_point(&fin)?;
            let mut text = format!(
                "spec: {}\n|H| = {}, chain stabilized at k = {}\n k  |A_k|  |B_k|  |C_k|\n",
                r.spec, r.h_order, r.stabilized_at
            );
            for s in &r.chain {
                text.push_str(&format!("{:>2}  {:>5}  {:>5}  {:>5}\n", s.k, s.a.len(), s.b.len(), s.c.len()));
            }
            text.push_str(&format!(
                "K0 = {}\nK1 = {}\nker = {} (order {})",
                labels(&fin, &r.k0),
                labels(&fin, &r.k1),
                labels(&fin, &r.ker),
                r.ker.len()
            ));
            let mut value = serde_json::to_value(&r)?;
            value["ker_labels"] = json!(r.ker_labels());
            Ok(Report {
                passed: r.ker_normal_in_factors,
                text,
                json: value,
            })
        }
    }
}

fn check_depth(depth: usize) -> Result<(), Failure> {
    if depth > amalgam::portrait::MAX_ENUMERATION_DEPTH {
        return Err(Failure(format!(
            "depth {depth} too large; truncations are enumerated up to depth {}",
            amalgam::portrait::MAX_ENUMERATION_DEPTH
        )));
    }
    Ok(())
}

fn finite_only(g: &GroupArgs, what: &str) -> Result<FiniteAmalgam, Failure> {
    match resolve(g)? {
        Backend::Finite(f) => Ok(*f),
        Backend::Gamma(_) => Err(Failure(format!("{what} needs a finite amalgam (--spec or a finite --group)"))),
    }
}

fn classify(g: &GroupArgs, search_len: usize) -> Result<Report, Failure> {
    let fin = finite_only(g, "classify")?;
    let r = classify_finite_h(&fin, search_len)?;
    let witness = match &r.condition_vii {
        WitnessSearch::Found { rendered, .. } => format!("found: {rendered}"),
        WitnessSearch::ProvenAbsent => "none (proven absent: ker is nontrivial)".to_string(),
        WitnessSearch::BoundExhausted { bound } => format!("none up to length {bound}"),
    };
    let text = format!(
        "spec: {}\nker = {} (order {})\nker trivial: {}\nC_k trivial at: {}\nH ∩ gHg^-1 = {{e}} witness: {}\nFC = ker: {}\nall equivalent: {}",
        r.spec,
        labels(&fin, &r.kernel.ker),
        r.ker_order,
        r.ker_trivial,
        r.ck_trivial_at.map_or("never".to_string(), |k| k.to_string()),
        witness,
        r.fc_equals_ker,
        r.all_equivalent
    );
    Ok(Report {
        passed: r.all_equivalent,
        text,
        json: serde_json::to_value(&r)?,
    })
}

fn side_of(i: usize) -> Result<Side, Failure> {
    Side::from_index(i).ok_or_else(|| Failure(format!("side must be 0 or 1, got {i}")))
}

fn c_chain(g: &GroupArgs, depth: usize, side: usize, k: usize) -> Result<Report, Failure> {
    let j = side_of(side)?;
    let (members, total): (Vec<String>, usize) = match resolve(g)? {
        Backend::Gamma(_) => {
            check_depth(depth)?;
            let v = c_chain_truncated(depth, j, k)?;
            (v.iter().map(ToString::to_string).collect(), 1usize << ((2 << depth) - 2))
        }
        Backend::Finite(fin) => {
            let a = fin.clone().amalgam();
            let mut v = Vec::new();
            for h in fin.h_elements() {
                if c_jk_membership(&a, &h, j, k)? {
                    v.push(fin.h_label(h));
                }
            }
            (v, fin.h_order())
        }
    };
    let text = format!("C_{{{side},<={k}}}: {} of {total} elements\n{}", members.len(), members.join("\n"));
    Ok(Report::ok(
        text.trim_end().to_string(),
        json!({ "side": side, "k": k, "count": members.len(), "total": total, "members": members }),
    ))
}

fn conjugate<C: FactorContract>(
    a: &Amalgam<C>,
    elements: &[String],
    max_len: usize,
    parse: impl Fn(&str) -> Result<amalgam::amalgam::Element<C>, Failure>,
    render: impl Fn(&amalgam::amalgam::Element<C>) -> String,
) -> Result<Report, Failure>
where
    C::H: serde::Serialize,
{
    let f = elements.iter().map(|w| parse(w)).collect::<Result<Vec<_>, _>>()?;
    match conjugate_out(a, &f, max_len)? {
        ConjugateOut::Success(w) => {
            let verified = verify_conjugation(a, &f, &w.r);
            let steps: Vec<String> = w
                .steps
                .iter()
                .map(|s| format!("F[{}] moved out by {}", s.element, syllables_to_string(&s.word)))
                .collect();
            Ok(Report {
                passed: verified,
                text: format!("r = {}\n{}\nr^-1 F r ∩ H = ∅: {verified}", render(&w.r), steps.join("\n")),
                json: json!({ "status": "success", "r": render(&w.r), "steps": w.steps, "verified": verified }),
            })
        }
        ConjugateOut::Failure(c) => Ok(Report {
            passed: false,
            text: format!(
                "no conjugator: F[{}] (currently {}) stays in H for all {} even words of length <= {}",
                c.stuck,
                render(&c.stuck_conjugate),
                c.words_tried,
                c.bound
            ),
            json: json!({
                "status": "failure",
                "stuck": c.stuck,
                "stuck_conjugate": render(&c.stuck_conjugate),
                "bound": c.bound,
                "words_tried": c.words_tried,
                "partial_r": render(&c.partial.r),
            }),
        }),
    }
}

fn conjugate_cmd(g: &GroupArgs, elements: &[String], max_len: usize) -> Result<Report, Failure> {
    match resolve(g)? {
        Backend::Gamma(a) => conjugate(&a, elements, max_len, |w| gamma_element(&a, w), format_nf),
        Backend::Finite(fin) => {
            let a = fin.clone().amalgam();
            conjugate(&a, elements, max_len, |w| Ok(a.normalize(&fin.parse_word(w)?)), |x| fin.format_nf(x))
        }
    }
}

fn theta(word: &str) -> Result<Report, Failure> {
    let w = parse_word(word)?;
    let t = theta_word(&w);
    let in_prime = in_gamma_prime(&gamma().normalize(&word_to_letters(&w)));
    Ok(Report::ok(
        t.to_string(),
        json!({ "word": word, "theta": t, "in_gamma_prime": in_prime }),
    ))
}

fn tree(g: &GroupArgs, radius: usize, format: &str, json_flag: bool) -> Result<Report, Failure> {
    let fmt: ExportFormat = if json_flag { ExportFormat::Json } else { format.parse()? };
    let ball = match resolve(g)? {
        Backend::Gamma(a) => build_ball(&a, radius)?,
        Backend::Finite(fin) => build_ball(&fin.amalgam(), radius)?,
    };
    let out = export_ball(&ball, fmt);
    let value = serde_json::from_str(&out).unwrap_or(Value::Null);
    Ok(Report::ok(out.trim_end().to_string(), value))
}

fn selftest(seed: u64) -> Result<Report, Failure> {
    let results = run_all(seed);
    let text = results.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
    Ok(Report {
        passed: results.iter().all(|r| r.passed),
        text,
        json: serde_json::to_value(&results)?,
    })
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure(e.to_string()))?;
    }
    match &cli.cmd {
        Cmd::Reduce { g, word } => reduce(g, std::slice::from_ref(word)),
        Cmd::Mul { g, words } => reduce(g, words),
        Cmd::VerifyPresentation { max_len } => verify_presentation(*max_len),
        Cmd::Kernel { g, depth, max_len, budget } => kernel(g, *depth, *max_len, *budget),
        Cmd::Classify { g, search_len } => classify(g, *search_len),
        Cmd::CChain { g, depth, side, k } => c_chain(g, *depth, *side, *k),
        Cmd::ConjugateOut { g, max_len, elements } => conjugate_cmd(g, elements, *max_len),
        Cmd::Theta { word } => theta(word),
        Cmd::Tree { g, radius, format } => tree(g, *radius, format, cli.json),
        Cmd::Selftest => selftest(cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let out = if cli.json {
                serde_json::to_string_pretty(&report.json).expect("report serializes")
            } else {
                report.text
            };
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(2)
        }
    }
}
