//! Fusion tables for M_k^0, M_t^0 and M(0) as data, with consistency checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub const FUSION_JSON: &str = include_str!("../data/fusion.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Rule {
    pub a: String,
    pub b: String,
    pub product: Vec<String>,
    pub source: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grading {
    /// "Z2xZ2" (degrees 0, a, b, c) or "Z3" (degrees 0, 1, 2).
    pub group: String,
    pub degree: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    /// The vertex operator algebra whose modules are labelled.
    pub algebra: String,
    pub unit: String,
    pub labels: Vec<String>,
    pub duals: BTreeMap<String, String>,
    #[serde(default)]
    pub grading: Option<Grading>,
    /// M-label to W-label for the schema W × M = W', W × W' = M + W'.
    #[serde(default)]
    pub partners: BTreeMap<String, String>,
    /// Every pair is determined, so associativity is checkable.
    pub closed: bool,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FusionData {
    pub schema: u32,
    #[serde(default)]
    pub note: String,
    pub tables: Vec<Table>,
}

/// A product a × b.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Fusion {
    Sum(Vec<String>),
    Unknown,
}

impl fmt::Display for Fusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fusion::Sum(v) if v.is_empty() => write!(f, "0"),
            Fusion::Sum(v) => write!(f, "{}", v.join(" + ")),
            Fusion::Unknown => write!(f, "unknown"),
        }
    }
}

type Multiset = BTreeMap<String, u32>;

impl Table {
    /// The stored product for (a, b) in this order.
    pub fn stored(&self, a: &str, b: &str) -> Option<&Vec<String>> {
        self.rules.iter().find(|r| r.a == a && r.b == b).map(|r| &r.product)
    }

    /// a × b, using N^c_ab = N^c_ba when only (b, a) is stored.
    pub fn fuse(&self, a: &str, b: &str) -> Fusion {
        match self.stored(a, b).or_else(|| self.stored(b, a)) {
            Some(p) => Fusion::Sum(p.clone()),
            None => Fusion::Unknown,
        }
    }

    fn n(&self, a: &str, b: &str, c: &str) -> Option<u32> {
        match self.fuse(a, b) {
            Fusion::Sum(p) => Some(p.iter().filter(|x| *x == c).count() as u32),
            Fusion::Unknown => None,
        }
    }

    fn has(&self, l: &str) -> bool {
        self.labels.iter().any(|x| x == l)
    }

    fn fuse_sums(&self, x: &Multiset, y: &Multiset) -> Option<Multiset> {
        let mut out = Multiset::new();
        for (a, m) in x {
            for (b, n) in y {
                let Fusion::Sum(p) = self.fuse(a, b) else { return None };
                for c in p {
                    *out.entry(c).or_default() += m * n;
                }
            }
        }
        Some(out)
    }
}

impl FusionData {
    pub fn builtin() -> Self {
        serde_json::from_str(FUSION_JSON).expect("built-in fusion data")
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// a × b in the first table that determines it; labels shared between
    /// tables (Mk^c, Wk^c) are read as modules of that table's algebra.
    pub fn fuse(&self, a: &str, b: &str) -> Fusion {
        self.tables
            .iter()
            .filter(|t| t.has(a) && t.has(b))
            .map(|t| t.fuse(a, b))
            .find(|f| *f != Fusion::Unknown)
            .unwrap_or(Fusion::Unknown)
    }
}

fn degree_sum(group: &str, x: &str, y: &str) -> Option<String> {
    match group {
        "Z2xZ2" => {
            let idx = |s: &str| ["0", "a", "b", "c"].iter().position(|k| *k == s);
            Some(["0", "a", "b", "c"][idx(x)? ^ idx(y)?].to_string())
        }
        "Z3" => Some(((x.parse::<u32>().ok()? + y.parse::<u32>().ok()?) % 3).to_string()),
        _ => None,
    }
}

/// Outcome of one family of checks on one table.
#[derive(Clone, Debug, Serialize)]
pub struct FusionCheck {
    pub table: String,
    pub check: String,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl FusionCheck {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

struct Tally {
    checked: usize,
    violations: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, violations: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    fn finish(self, table: &Table, check: &str) -> FusionCheck {
        FusionCheck { table: table.name.clone(), check: check.to_string(), checked: self.checked, violations: self.violations }
    }
}

/// Well-formedness, commutativity, contragredient symmetry, grading,
/// unit, associativity (closed tables) and the M/W schema.
pub fn check_table_consistency(data: &FusionData) -> Vec<FusionCheck> {
    let mut out = Vec::new();
    for t in &data.tables {
        let mut wf = Tally::new();
        for r in &t.rules {
            let distinct: BTreeSet<&String> = r.product.iter().collect();
            wf.check(distinct.len() == r.product.len(), || format!("{} x {}: multiplicity above 1", r.a, r.b));
            for l in [&r.a, &r.b].into_iter().chain(&r.product) {
                wf.check(t.has(l), || format!("{} x {}: unknown label {l}", r.a, r.b));
            }
        }
        for l in &t.labels {
            wf.check(t.duals.get(l).is_some_and(|d| t.has(d) && t.duals.get(d) == Some(l)), || format!("dual of {l}"));
        }
        out.push(wf.finish(t, "well-formed"));

        let mut comm = Tally::new();
        for r in &t.rules {
            if let Some(p) = t.stored(&r.b, &r.a) {
                let x: BTreeSet<&String> = r.product.iter().collect();
                let y: BTreeSet<&String> = p.iter().collect();
                comm.check(x == y, || format!("{} x {} != {} x {}", r.a, r.b, r.b, r.a));
            }
        }
        out.push(comm.finish(t, "commutativity"));

        let mut dual = Tally::new();
        for a in &t.labels {
            for b in &t.labels {
                for c in &t.labels {
                    let (bd, cd) = (&t.duals[b], &t.duals[c]);
                    if let (Some(x), Some(y)) = (t.n(a, b, c), t.n(a, cd, bd)) {
                        dual.check(x == y, || format!("N({a},{b};{c}) = {x} but N({a},{cd};{bd}) = {y}"));
                    }
                }
            }
        }
        out.push(dual.finish(t, "contragredient symmetry"));

        if let Some(g) = &t.grading {
            let mut gr = Tally::new();
            for r in &t.rules {
                let want = degree_sum(&g.group, &g.degree[&r.a], &g.degree[&r.b]);
                for c in &r.product {
                    gr.check(want.as_deref() == Some(g.degree[c].as_str()), || format!("{} x {} contains {c}", r.a, r.b));
                }
            }
            out.push(gr.finish(t, "grading"));
        }

        let mut unit = Tally::new();
        for x in &t.labels {
            unit.check(t.fuse(&t.unit, x) == Fusion::Sum(vec![x.clone()]), || format!("{} x {x}", t.unit));
        }
        out.push(unit.finish(t, "unit"));

        if t.closed {
            let mut assoc = Tally::new();
            let one = |l: &String| Multiset::from([(l.clone(), 1)]);
            for a in &t.labels {
                for b in &t.labels {
                    for c in &t.labels {
                        let left = t.fuse_sums(&one(a), &one(b)).and_then(|ab| t.fuse_sums(&ab, &one(c)));
                        let right = t.fuse_sums(&one(b), &one(c)).and_then(|bc| t.fuse_sums(&one(a), &bc));
                        assoc.check(left.is_some() && left == right, || format!("({a} x {b}) x {c}"));
                    }
                }
            }
            out.push(assoc.finish(t, "associativity"));
        }

        if !t.partners.is_empty() {
            let w0 = &t.partners[&t.unit];
            let mut schema = Tally::new();
            for (m, w) in &t.partners {
                schema.check(t.fuse(w0, m) == Fusion::Sum(vec![w.clone()]), || format!("{w0} x {m}"));
                let mut mw = vec![m.clone(), w.clone()];
                let got = match t.fuse(w0, w) {
                    Fusion::Sum(mut p) => {
                        p.sort();
                        mw.sort();
                        p == mw
                    }
                    Fusion::Unknown => false,
                };
                schema.check(got, || format!("{w0} x {w}"));
            }
            out.push(schema.finish(t, "M/W schema"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(v: &[&str]) -> Fusion {
        Fusion::Sum(v.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn lookups() {
        let d = FusionData::builtin();
        assert_eq!(d.fuse("Wt^0", "Wt^0"), sum(&["Mt^0", "Wt^0"]));
        assert_eq!(d.fuse("Mk^a", "Mk^b"), sum(&["Mk^c"]));
        assert_eq!(d.fuse("W(0)", "WT(tau)(1)"), sum(&["MT(tau)(1)", "WT(tau)(1)"]));
        assert_eq!(d.fuse("WT(tau)(1)", "W(0)"), sum(&["MT(tau)(1)", "WT(tau)(1)"]));
        assert_eq!(d.fuse("W(0)", "Mk^c"), sum(&["Wk^c"]));
        assert_eq!(d.fuse("Wk^a", "Wk^b"), sum(&["Mk^c", "Wk^c"]));
        assert_eq!(d.fuse("M(1)", "M(1)"), Fusion::Unknown);
        assert_eq!(d.fuse("W(1)", "MT(tau)(0)"), Fusion::Unknown);
        assert_eq!(d.fuse("M(1)", "nonsense"), Fusion::Unknown);
        assert_eq!(Fusion::Unknown.to_string(), "unknown");
    }

    #[test]
    fn builtin_tables_consistent() {
        let d = FusionData::builtin();
        let r = check_table_consistency(&d);
        assert_eq!(d.table("m0").unwrap().labels.len(), 20);
        for c in &r {
            assert!(c.ok(), "{c:?}");
        }
        assert_eq!(r.iter().filter(|c| c.check == "associativity").count(), 2);
    }

    #[test]
    fn corrupted_tables_rejected() {
        let mut d = FusionData::builtin();
        let t = d.tables.iter_mut().find(|t| t.name == "ternary").unwrap();
        let r = t.rules.iter_mut().find(|r| r.a == "Mt^1" && r.b == "Wt^1").unwrap();
        r.product = vec!["Wt^0".into()];
        let bad: Vec<String> = check_table_consistency(&d).into_iter().filter(|c| !c.ok()).map(|c| c.check).collect();
        for want in ["commutativity", "grading", "associativity"] {
            assert!(bad.iter().any(|b| b == want), "{bad:?}");
        }

        let mut d = FusionData::builtin();
        let t = d.tables.iter_mut().find(|t| t.name == "m0").unwrap();
        t.duals.insert("W(1)".into(), "W(1)".into());
        t.duals.insert("W(2)".into(), "W(2)".into());
        let bad: Vec<String> = check_table_consistency(&d).into_iter().filter(|c| !c.ok()).map(|c| c.check).collect();
        assert!(bad.iter().any(|b| b == "contragredient symmetry"), "{bad:?}");
    }
}
