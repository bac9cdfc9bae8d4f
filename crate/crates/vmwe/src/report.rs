//! Human-readable tables.

use std::fmt::Write;

use vmwe_core::evaluation::EvalReport;
use vmwe_core::tuning::TuningResult;

/// Tuning results laid out as ranking / k / classifier / P / R / F / sigma,
/// grouped by ranking method. The winning row is starred.
pub fn summary_table(cells: &[TuningResult], winner: Option<usize>) -> String {
    let mut s = String::new();
    let rule = "+--------+----+------+-------+-------+-------+-------+\n";
    s.push_str(rule);
    s.push_str("| rank   |  k | clf  |     P |     R |     F | sigma |\n");
    s.push_str(rule);
    let mut prev = None;
    for (i, c) in cells.iter().enumerate() {
        if prev.is_some() && prev != Some(c.method) {
            s.push_str(rule);
        }
        let method = if prev == Some(c.method) {
            String::new()
        } else {
            c.method.to_string()
        };
        prev = Some(c.method);
        let star = if winner == Some(i) { "*" } else { " " };
        let _ = writeln!(
            s,
            "| {method:<6} | {:>2} | {:<4} | {:.3} | {:.3} | {:.3}{star}| {:.3} |",
            c.best_k,
            c.classifier.to_string(),
            c.mean_p,
            c.mean_r,
            c.mean_f,
            c.sigma
        );
    }
    s.push_str(rule);
    s
}

pub fn summary_tsv(fingerprint: &str, cells: &[TuningResult]) -> String {
    let mut s = format!("# fingerprint={fingerprint}\nranking\tclassifier\tk\tP\tR\tF\tsigma\tfeatures\n");
    for c in cells {
        let feats: Vec<&str> = c.selected_features.iter().map(|f| f.as_str()).collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.method.as_str(),
            c.classifier.as_str(),
            c.best_k,
            c.mean_p,
            c.mean_r,
            c.mean_f,
            c.sigma,
            feats.join(",")
        );
    }
    s
}

pub fn eval_table(reports: &[EvalReport]) -> String {
    let mut s = String::from("scope        TP     FP     FN      P      R      F\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{:<10} {:>4} {:>6} {:>6} {:.4} {:.4} {:.4}",
            r.scope.to_string(),
            r.counts.tp,
            r.counts.fp,
            r.counts.fn_,
            r.precision,
            r.recall,
            r.f
        );
    }
    s
}
