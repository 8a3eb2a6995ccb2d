//! The verification suites behind each command, run against a data
//! configuration (built-in or loaded from a directory).

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::cards::{parse_cards, verify_untwisted, Card, CARDS_JSON};
use crate::catalog::{check_identities, IdentityCheck, APPENDIX_B, STRUCTURE_CONSTANTS};
use crate::charq::{twisted_split, verify_decompositions, verify_twisted, weight_checks};
use crate::classify::{classify_all, parse_quadruplets, sigma_permutation_check, zhu_algebra_structure, Quadruplet, QUADRUPLETS_JSON};
use crate::commutators::check_commutators;
use crate::fusion::{check_table_consistency, Fusion, FusionData, FUSION_JSON};
use crate::property::{borcherds_suite, equivariance_suite, o_annihilation_suite};
use crate::report::SuiteReport;
use crate::zhu::{compare_scalar_system, derive_scalar_system, parse_scalar_system, verify_o_homomorphism, ExpansionTable, SCALAR_SYSTEM};

/// Commutators are checked on the graded basis up to this weight at most.
pub const COMMUTATOR_MAX_WEIGHT: i64 = 5;
/// Range |m|, |n| ≤ 3 of the commutator modes.
pub const COMMUTATOR_RANGE: i64 = 3;
pub const BORCHERDS_CASES: usize = 200;
pub const EQUIVARIANCE_CASES: usize = 100;
pub const O_ANNIHILATION_CASES: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}: {1}")]
    Parse(String, String),
    #[error("{0}: not a directory")]
    NotADirectory(String),
}

/// The data files every suite reads.
#[derive(Clone, Debug)]
pub struct Config {
    pub structure_constants: String,
    pub appendix_b: String,
    pub scalar_system: String,
    pub cards: Vec<Card>,
    pub quadruplets: Vec<Quadruplet>,
    pub fusion: FusionData,
}

impl Config {
    pub fn builtin() -> Self {
        Config::from_texts(STRUCTURE_CONSTANTS, APPENDIX_B, SCALAR_SYSTEM, CARDS_JSON, QUADRUPLETS_JSON, FUSION_JSON).expect("built-in data")
    }

    fn from_texts(sc: &str, ab: &str, ss: &str, cards: &str, quads: &str, fusion: &str) -> Result<Self, ConfigError> {
        let perr = |f: &str, e: String| ConfigError::Parse(f.into(), e);
        check_parse(sc).map_err(|e| perr("structure_constants.txt", e))?;
        check_parse(ab).map_err(|e| perr("appendix_b.txt", e))?;
        parse_scalar_system(ss).map_err(|e| perr("scalar_system.txt", e))?;
        Ok(Config {
            structure_constants: sc.into(),
            appendix_b: ab.into(),
            scalar_system: ss.into(),
            cards: parse_cards(cards).map_err(|e| perr("cards.json", e.to_string()))?,
            quadruplets: parse_quadruplets(quads).map_err(|e| perr("quadruplets.json", e.to_string()))?,
            fusion: serde_json::from_str(fusion).map_err(|e| perr("fusion.json", e.to_string()))?,
        })
    }

    /// Files present in `dir` replace the built-in ones: structure_constants.txt,
    /// appendix_b.txt, scalar_system.txt, cards.json, quadruplets.json, fusion.json.
    pub fn from_dir(dir: &Path) -> Result<Self, ConfigError> {
        if !dir.is_dir() {
            return Err(ConfigError::NotADirectory(dir.display().to_string()));
        }
        let read = |name: &str, default: &str| -> Result<String, ConfigError> {
            let p = dir.join(name);
            if p.exists() {
                std::fs::read_to_string(&p).map_err(|e| ConfigError::Io(p.display().to_string(), e))
            } else {
                Ok(default.to_string())
            }
        };
        Config::from_texts(
            &read("structure_constants.txt", STRUCTURE_CONSTANTS)?,
            &read("appendix_b.txt", APPENDIX_B)?,
            &read("scalar_system.txt", SCALAR_SYSTEM)?,
            &read("cards.json", CARDS_JSON)?,
            &read("quadruplets.json", QUADRUPLETS_JSON)?,
            &read("fusion.json", FUSION_JSON)?,
        )
    }

    pub fn expansion_table(&self) -> Result<ExpansionTable, String> {
        ExpansionTable::from_texts(&[&self.structure_constants, &self.appendix_b]).map_err(|e| e.to_string())
    }
}

fn check_parse(text: &str) -> Result<(), String> {
    crate::words::parse_identities(text).map(|_| ()).map_err(|e| e.to_string())
}

/// Every suite, in pipeline order: catalog, zhu, classify, then the
/// independent character and fusion suites.
pub const ALL_SUITES: [&str; 13] = [
    "verify structure",
    "verify appendix-b",
    "verify singular",
    "verify section4",
    "verify commutators",
    "verify borcherds",
    "zhu derive",
    "classify run",
    "classify zhu-structure",
    "classify sigma",
    "chars decompositions",
    "chars twisted",
    "fusion check",
];

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub max_weight: i64,
    pub seed: u64,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_weight: 6, seed: 0, timing: false }
    }
}

fn details<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("details serialize")
}

fn failed<'a>(checks: impl IntoIterator<Item = &'a IdentityCheck>) -> Vec<String> {
    checks.into_iter().filter(|c| !c.holds).map(|c| c.lhs.clone()).collect()
}

fn identity_lines(cfg: &Config) -> Result<Vec<IdentityCheck>, String> {
    check_identities(&cfg.structure_constants).map_err(|e| e.to_string())
}

fn error_report(suite: &str, e: String) -> (bool, String, serde_json::Value) {
    (false, format!("error: {e}"), json!({ "suite": suite, "error": e }))
}

/// Runs one suite by command path.
pub fn run_suite(name: &str, cfg: &Config, opt: &Options) -> Option<SuiteReport> {
    let start = Instant::now();
    let (ok, summary, details) = match name {
        "verify structure" => match identity_lines(cfg) {
            Ok(all) => {
                let is_pair = |c: &&IdentityCheck, u: &str, v: &str| {
                    let p: Vec<&str> = c.lhs.split_whitespace().collect();
                    p.len() == 3 && p[0] == u && p[2] == v
                };
                let ids: Vec<&IdentityCheck> = all.iter().filter(|c| ["J", "K", "P"].iter().any(|g| is_pair(c, g, g))).collect();
                let zeros: Vec<&IdentityCheck> = all.iter().filter(|c| is_pair(c, "J", "P") || is_pair(c, "K", "P")).collect();
                let bad: Vec<String> = failed(ids.iter().copied().chain(zeros.iter().copied()));
                (
                    bad.is_empty() && !ids.is_empty(),
                    format!("{} identities checked, {} vanishing products J_nP, K_nP checked, {} failed", ids.len(), zeros.len(), bad.len()),
                    json!({ "identities": ids, "vanishing": zeros, "failed": bad }),
                )
            }
            Err(e) => error_report(name, e),
        },
        "verify appendix-b" => match check_identities(&cfg.appendix_b) {
            Ok(all) => {
                let bad = failed(&all);
                let resolved: Vec<&(String, String)> = all.iter().flat_map(|c| &c.resolved).collect();
                (
                    bad.is_empty() && !all.is_empty(),
                    format!("{} expansions checked, {} missing signs resolved, {} failed", all.len(), resolved.len(), bad.len()),
                    json!({ "expansions": all, "failed": bad }),
                )
            }
            Err(e) => error_report(name, e.to_string()),
        },
        "verify singular" => match identity_lines(cfg) {
            Ok(all) => {
                let nulls: Vec<&IdentityCheck> = all.iter().filter(|c| c.lhs == "null").collect();
                let bad = failed(nulls.iter().copied());
                (bad.is_empty() && !nulls.is_empty(), format!("{} singular vectors vanish, {} failed", nulls.len() - bad.len(), bad.len()), details(&nulls))
            }
            Err(e) => error_report(name, e),
        },
        "verify section4" => {
            let checks = verify_untwisted(&cfg.cards);
            let bad: Vec<&String> = checks.iter().filter(|c| !c.ok()).map(|c| &c.card).collect();
            let n = cfg.cards.iter().filter(|c| !c.is_twisted()).count();
            (
                bad.is_empty() && checks.len() == n && n > 0,
                format!("{} of {n} untwisted top-level tables recomputed exactly", checks.len() - bad.len()),
                details(&checks),
            )
        }
        "verify commutators" => {
            let w = opt.max_weight.min(COMMUTATOR_MAX_WEIGHT);
            let reps = check_commutators(w, COMMUTATOR_RANGE);
            let checked: usize = reps.iter().map(|r| r.checked).sum();
            let bad = reps.iter().filter(|r| !r.ok()).count();
            (
                bad == 0,
                format!("{} relations on the weight <= {w} basis, |m|,|n| <= {COMMUTATOR_RANGE}, {checked} cases, {bad} failed", reps.len()),
                details(&reps),
            )
        }
        "verify borcherds" => {
            let reps = [
                borcherds_suite(opt.seed, BORCHERDS_CASES),
                equivariance_suite(opt.seed, EQUIVARIANCE_CASES),
                o_annihilation_suite(&cfg.cards, opt.seed, O_ANNIHILATION_CASES),
            ];
            let text: Vec<String> = reps.iter().map(|r| format!("{} {}/{}", r.name, r.passed, r.cases)).collect();
            (reps.iter().all(|r| r.ok()), format!("seed {}: {}", opt.seed, text.join(", ")), details(&reps))
        }
        "zhu derive" => match cfg.expansion_table().and_then(|t| derive_scalar_system(&t).map_err(|e| e.to_string())) {
            Ok(sys) => match parse_scalar_system(&cfg.scalar_system) {
                Ok(printed) => {
                    let matches = compare_scalar_system(&sys, &printed);
                    let good = matches.iter().filter(|m| m.ok()).count();
                    let pcp = sys.p_circ_p.is_zero();
                    (
                        pcp && good == matches.len() && !matches.is_empty(),
                        format!("P*P gives [J1K1P]; P∘P = 0 {}; {good} of {} relations match the printed system", if pcp { "holds" } else { "FAILS" }, matches.len()),
                        json!({ "jkp": sys.jkp.to_string(), "p_circ_p": sys.p_circ_p.to_string(), "relations": matches }),
                    )
                }
                Err(e) => error_report(name, e),
            },
            Err(e) => error_report(name, e),
        },
        "classify run" => match cfg.expansion_table().and_then(|t| derive_scalar_system(&t).map_err(|e| e.to_string())) {
            Ok(sys) => {
                let rep = classify_all(&sys, &cfg.quadruplets, &cfg.cards);
                let all_match = rep.outcomes.iter().all(|o| o.rejected || o.card_matches);
                (
                    rep.ok(),
                    format!(
                        "{} solvable / {} rejected / {}; {} of {} symbolic-b1 cases rejected; {} modules",
                        rep.solvable,
                        rep.rejected,
                        if all_match { "all matches" } else { "MISMATCHES" },
                        rep.symbolic_rejected,
                        rep.symbolic_total,
                        rep.total_modules
                    ),
                    details(&rep),
                )
            }
            Err(e) => error_report(name, e),
        },
        "classify zhu-structure" => match cfg.expansion_table() {
            Ok(table) => {
                let s = zhu_algebra_structure(&cfg.cards);
                let homs: Vec<_> = cfg.cards.iter().map(|c| verify_o_homomorphism(c, &table).map_err(|e| format!("{}: {e}", c.name))).collect();
                let hom_ok = homs.iter().filter(|h| h.as_ref().is_ok_and(|h| h.ok())).count();
                let two = s.two_dim_blocks.len();
                (
                    s.blocks_simple && s.dimension == s.one_dim_blocks + 4 * two && hom_ok == cfg.cards.len(),
                    format!("dim A(V) = {} = {} + {two}·4; o-homomorphism holds on {hom_ok} of {} cards", s.dimension, s.one_dim_blocks, cfg.cards.len()),
                    json!({ "structure": s, "homomorphism": homs.iter().map(|h| match h { Ok(h) => details(h), Err(e) => json!({ "error": e }) }).collect::<Vec<_>>() }),
                )
            }
            Err(e) => error_report(name, e),
        },
        "classify sigma" => {
            let pairs = sigma_permutation_check(&cfg.cards);
            let good = pairs.iter().filter(|p| p.ok()).count();
            (good == pairs.len() && !pairs.is_empty(), format!("{good} of {} σ-images reproduced by the sign flip", pairs.len()), details(&pairs))
        }
        "chars decompositions" => {
            let checks = verify_decompositions(opt.max_weight);
            let good = checks.iter().filter(|c| c.ok).count();
            (good == checks.len() && !checks.is_empty(), format!("{good} of {} identities hold through grade {}", checks.len(), opt.max_weight), details(&checks))
        }
        "chars twisted" => {
            let rep = verify_twisted(opt.max_weight);
            let tc = twisted_split(opt.max_weight);
            let weights = weight_checks(&tc, &cfg.quadruplets, &cfg.cards);
            let wgood = weights.iter().filter(|w| w.ok).count();
            let show = |h: &[(String, i64)]| h.iter().map(|(e, c)| if *c == 1 { format!("q^{e}") } else { format!("{c}q^{e}") }).collect::<Vec<_>>().join(" + ");
            (
                rep.ok() && wgood == weights.len(),
                format!("ch M_T = {} + ...; ch W_T = {} + ...; {wgood} of {} weights agree", show(&rep.m_t_head), show(&rep.w_t_head), weights.len()),
                json!({ "twisted": rep, "weights": weights }),
            )
        }
        "fusion check" => {
            let checks = check_table_consistency(&cfg.fusion);
            let sample = [("Wt^0", "Wt^0"), ("Mk^a", "Mk^b"), ("W(0)", "WT(tau)(1)"), ("M(1)", "M(2)")];
            let lookups: Vec<serde_json::Value> = sample.iter().map(|(a, b)| json!({ "a": a, "b": b, "product": cfg.fusion.fuse(a, b).to_string() })).collect();
            let examples_ok = cfg.fusion.fuse("M(1)", "M(2)") == Fusion::Unknown;
            let good = checks.iter().filter(|c| c.ok()).count();
            let cases: usize = checks.iter().map(|c| c.checked).sum();
            (
                good == checks.len() && !checks.is_empty() && examples_ok,
                format!("{good} of {} table checks hold ({cases} cases)", checks.len()),
                json!({ "checks": checks, "lookups": lookups }),
            )
        }
        _ => return None,
    };
    Some(SuiteReport { suite: name.to_string(), ok, summary, details, millis: opt.timing.then(|| start.elapsed().as_millis()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        let cfg = Config::builtin();
        let opt = Options::default();
        for name in ["verify structure", "verify singular", "fusion check", "classify sigma"] {
            let r = run_suite(name, &cfg, &opt).unwrap();
            assert!(r.ok, "{name}: {}", r.summary);
            assert!(r.millis.is_none());
        }
        let r = run_suite("verify structure", &cfg, &opt).unwrap();
        assert!(r.summary.starts_with("16 identities checked"), "{}", r.summary);
        assert!(run_suite("verify nothing", &cfg, &opt).is_none());
    }

    #[test]
    fn config_directory_overrides() {
        let dir = std::env::temp_dir().join(format!("vltau-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("structure_constants.txt"), STRUCTURE_CONSTANTS.replace("J 5 J | -84 1", "J 5 J | -85 1")).unwrap();
        let cfg = Config::from_dir(&dir).unwrap();
        let r = run_suite("verify structure", &cfg, &Options::default()).unwrap();
        assert!(!r.ok);
        std::fs::write(dir.join("fusion.json"), "{").unwrap();
        assert!(Config::from_dir(&dir).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
        assert!(Config::from_dir(&dir).is_err());
    }
}
