use serde_json::{json, Value};

use wkb_core::kb::ExtendedCost;
use wkb_core::reason::Verdict;

/// Everything a command prints, in either output format.
pub struct Report {
    problem: &'static str,
    semantics: Option<String>,
    k: Option<ExtendedCost>,
    answer: bool,
    complete: bool,
    opt: Option<ExtendedCost>,
    witness: Option<Value>,
    nodes: u64,
    pub millis: u128,
    status: Option<&'static str>,
    answers: Option<Vec<(Vec<String>, Verdict)>>,
    diagnostics: Option<Vec<String>>,
    /// Verbatim output of `gen`.
    text: Option<String>,
}

impl Report {
    fn base(problem: &'static str) -> Self {
        Report {
            problem,
            semantics: None,
            k: None,
            answer: false,
            complete: true,
            opt: None,
            witness: None,
            nodes: 0,
            millis: 0,
            status: None,
            answers: None,
            diagnostics: None,
            text: None,
        }
    }

    pub fn decision(
        problem: &'static str,
        semantics: Option<String>,
        k: Option<ExtendedCost>,
        v: Verdict,
        nodes: u64,
    ) -> Self {
        let status = (v.opt_used == Some(ExtendedCost::Inf)).then_some("opt=inf");
        Report {
            semantics,
            k,
            answer: v.answer,
            complete: v.complete,
            opt: v.opt_used,
            witness: v.witness.map(|i| i.to_json()),
            nodes,
            status,
            ..Report::base(problem)
        }
    }

    pub fn opt(opt: ExtendedCost, complete: bool, nodes: u64) -> Self {
        Report { answer: opt.is_finite(), complete, opt: Some(opt), nodes, ..Report::base("opt") }
    }

    pub fn answers(semantics: String, table: Vec<(Vec<String>, Verdict)>, nodes: u64) -> Self {
        Report {
            semantics: Some(semantics),
            answer: table.iter().any(|(_, v)| v.answer),
            complete: table.iter().all(|(_, v)| v.complete),
            nodes,
            answers: Some(table),
            ..Report::base("answers")
        }
    }

    pub fn validation(diagnostics: Vec<String>) -> Self {
        Report { answer: diagnostics.is_empty(), diagnostics: Some(diagnostics), ..Report::base("validate") }
    }

    pub fn generated(text: String) -> Self {
        Report { answer: true, text: Some(text), ..Report::base("gen") }
    }

    pub fn oracle(
        problem: &'static str,
        semantics: Option<String>,
        k: Option<ExtendedCost>,
        answer: bool,
        opt: Option<ExtendedCost>,
    ) -> Self {
        Report { semantics, k, answer, opt, ..Report::base(problem) }
    }

    /// 0 yes, 1 final no, 3 no within the domain bound only.
    pub fn exit_code(&self) -> u8 {
        match (self.answer, self.complete) {
            (true, _) => 0,
            (false, true) => 1,
            (false, false) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        if let Some(text) = &self.text {
            return text.clone();
        }
        let mut v = json!({
            "problem": self.problem,
            "semantics": self.semantics,
            "k": self.k,
            "answer": self.answer,
            "complete": self.complete,
            "opt": self.opt,
            "witness": self.witness,
            "stats": { "nodes": self.nodes, "millis": self.millis as u64 },
        });
        if let Some(status) = self.status {
            v["status"] = json!(status);
        }
        if let Some(table) = &self.answers {
            v["answers"] = table
                .iter()
                .map(|(t, v)| json!({ "tuple": t, "answer": v.answer, "complete": v.complete }))
                .collect();
        }
        if let Some(d) = &self.diagnostics {
            v["diagnostics"] = json!(d);
        }
        serde_json::to_string_pretty(&v).expect("serializable")
    }

    pub fn to_plain(&self) -> String {
        if let Some(text) = &self.text {
            return text.clone();
        }
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!("{}: {}", self.problem, yes_no(self.answer));
        if !self.complete {
            out.push_str(" (within the domain bound)");
        }
        out.push('\n');
        if let Some(s) = &self.semantics {
            out.push_str(&format!("semantics: {s}\n"));
        }
        if let Some(k) = &self.k {
            out.push_str(&format!("k: {k}\n"));
        }
        if let Some(opt) = &self.opt {
            out.push_str(&format!("opt: {opt}\n"));
        }
        if let Some(status) = self.status {
            out.push_str(&format!("status: {status}\n"));
        }
        for (t, v) in self.answers.iter().flatten() {
            let mark = if v.complete { "" } else { " (within bound)" };
            out.push_str(&format!("({}) {}{mark}\n", t.join(", "), yes_no(v.answer)));
        }
        for d in self.diagnostics.iter().flatten() {
            out.push_str(&format!("{d}\n"));
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!("witness: {w}\n"));
        }
        out.push_str(&format!("nodes: {}, {} ms\n", self.nodes, self.millis));
        out
    }
}
