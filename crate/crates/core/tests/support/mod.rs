//! Independent reference implementations shared by the integration tests
//! and the acceptance report. Each check returns `Err` with a description
//! of the first disagreement.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vmwe_core::cart::{grow, ColumnSampler};
use vmwe_core::classifiers::nb::NaiveBayes;
use vmwe_core::classifiers::svm::{LinearSvm, SvmConfig};
use vmwe_core::extraction::{extract_candidates, ExtractionConfig, Label};
use vmwe_core::features::{FeatureKind, SparseMatrix};
use vmwe_core::ranking::{chi2_scores, forest_importance, information_gain, ForestConfig};
use vmwe_core::{build_lexicon, compute_features, parse_cupt, FeatureValue, Lexicon, Sentence};

pub type Check<T = ()> = Result<T, String>;

pub const EXTRACT_FIXTURE: &str = include_str!("../fixtures/extract50.cupt");
pub const EXTRACT_EXPECTED: &str = include_str!("../fixtures/extract50.expected.tsv");

fn close(a: f64, b: f64, tol: f64, what: &str) -> Check {
    if (a - b).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}"))
    }
}

pub fn random_fixture(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> (SparseMatrix, Vec<bool>) {
    loop {
        let m = SparseMatrix {
            n_cols: cols,
            rows: (0..rows)
                .map(|_| (0..cols as u32).filter(|_| rng.random_bool(0.4)).collect())
                .collect(),
        };
        let y: Vec<bool> = (0..rows).map(|_| rng.random_bool(0.5)).collect();
        if y.iter().any(|&l| l) && y.iter().any(|&l| !l) {
            return (m, y);
        }
    }
}

fn active(m: &SparseMatrix, r: usize, c: usize) -> bool {
    m.rows[r].contains(&(c as u32))
}

// Feature scores ------------------------------------------------------------

/// Chi-squared against N(ad - bc)^2 / (row and column margins).
pub fn chi2_oracle(seed: u64, fixtures: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..fixtures {
        let n = rng.random_range(4..=30);
        let (m, y) = random_fixture(&mut rng, n, 5);
        let scores = chi2_scores(&m, &y).map_err(|e| e.to_string())?;
        for (c, s) in scores.iter().enumerate() {
            let mut t = [[0.0f64; 2]; 2];
            for r in 0..n {
                t[usize::from(!active(&m, r, c))][usize::from(!y[r])] += 1.0;
            }
            let [[a, b], [cc, d]] = t;
            if a + b == 0.0 || cc + d == 0.0 {
                if s.is_some() {
                    return Err(format!("constant column {c} was scored"));
                }
                continue;
            }
            let margins = (a + b) * (cc + d) * (a + cc) * (b + d);
            let expect = n as f64 * (a * d - b * cc).powi(2) / margins;
            let got = s.ok_or_else(|| format!("column {c} not scored"))?;
            close(got, expect, 1e-9, "chi2")?;
        }
    }
    Ok(())
}

/// Information gain against mutual information from joint frequencies.
pub fn gain_oracle(seed: u64, fixtures: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = [
        None,
        Some(FeatureValue::Cat("a".into())),
        Some(FeatureValue::Cat("b".into())),
        Some(FeatureValue::Bool(true)),
    ];
    for _ in 0..fixtures {
        let n = rng.random_range(2..=30);
        let xs: Vec<Option<&FeatureValue>> =
            (0..n).map(|_| values[rng.random_range(0..values.len())].as_ref()).collect();
        let ys: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let mut joint: BTreeMap<(Option<&FeatureValue>, bool), f64> = BTreeMap::new();
        let mut px: BTreeMap<Option<&FeatureValue>, f64> = BTreeMap::new();
        let mut py: BTreeMap<bool, f64> = BTreeMap::new();
        for (x, &l) in xs.iter().zip(&ys) {
            *joint.entry((*x, l)).or_default() += 1.0 / n as f64;
            *px.entry(*x).or_default() += 1.0 / n as f64;
            *py.entry(l).or_default() += 1.0 / n as f64;
        }
        let mi: f64 = joint
            .iter()
            .map(|(&(x, l), &p)| p * (p / (px[&x] * py[&l])).log2())
            .sum();
        close(information_gain(&xs, &ys), mi.max(0.0), 1e-9, "gain")?;
    }
    Ok(())
}

/// Naive Bayes margins and decisions against the posterior obtained by
/// enumerating every binary input.
pub fn nb_oracle(seed: u64, fixtures: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..fixtures {
        let cols = rng.random_range(1..=4);
        let n = rng.random_range(2..=12);
        let (m, y) = random_fixture(&mut rng, n, cols);
        let nb = NaiveBayes::fit(&m, &y);
        let joint = |x: u32, class: bool| -> f64 {
            let members: Vec<usize> = (0..n).filter(|&r| y[r] == class).collect();
            let mut p = members.len() as f64 / n as f64;
            for c in 0..cols {
                let on = members.iter().filter(|&&r| active(&m, r, c)).count() as f64;
                let p_on = (on + 1.0) / (members.len() as f64 + 2.0);
                p *= if x & (1 << c) != 0 { p_on } else { 1.0 - p_on };
            }
            p
        };
        let mut mass = [0.0, 0.0];
        for x in 0..(1u32 << cols) {
            let row: Vec<u32> = (0..cols as u32).filter(|c| x & (1 << c) != 0).collect();
            let (pp, pn) = (joint(x, true), joint(x, false));
            mass[0] += pp;
            mass[1] += pn;
            let margin = nb.margin(&row);
            close(margin, (pp / pn).ln(), 1e-9, "nb margin")?;
            // At an exact posterior tie the sign of the margin is rounding noise.
            let posterior = pp / (pp + pn);
            if (posterior - 0.5).abs() > 1e-12 && (margin > 0.0) != (posterior > 0.5) {
                return Err(format!("nb decision differs on {row:?}"));
            }
        }
        let prior = y.iter().filter(|&&l| l).count() as f64 / n as f64;
        close(mass[0], prior, 1e-12, "positive mass")?;
        close(mass[1], 1.0 - prior, 1e-12, "negative mass")?;
    }
    Ok(())
}

/// Exhaustive CART, lowest column on exact ties. Pushes leaf row sets.
fn reference_tree(m: &SparseMatrix, y: &[bool], rows: &[usize], root: f64, imp: &mut [f64], leaves: &mut Vec<Vec<usize>>) {
    let gini = |rs: &[usize]| {
        let p = rs.iter().filter(|&&r| y[r]).count() as f64 / rs.len() as f64;
        2.0 * p * (1.0 - p)
    };
    // Half the weighted child impurity, as an exact fraction.
    let exact = |rs: &[usize]| -> (i128, i128) {
        let p = rs.iter().filter(|&&r| y[r]).count() as i128;
        (p * (rs.len() as i128 - p), rs.len() as i128)
    };
    let pos = rows.iter().filter(|&&r| y[r]).count();
    let mut best: Option<(usize, (i128, i128))> = None;
    if pos != 0 && pos != rows.len() {
        for c in 0..m.n_cols {
            let (a, b): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| active(m, r, c));
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let ((na, da), (nb, db)) = (exact(&a), exact(&b));
            let child = (na * db + nb * da, da * db);
            if best.is_none_or(|(_, v)| child.0 * v.1 < v.0 * child.1) {
                best = Some((c, child));
            }
        }
    }
    match best {
        None => leaves.push(rows.to_vec()),
        Some((c, _)) => {
            let (a, b): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| active(m, r, c));
            let child = (a.len() as f64 * gini(&a) + b.len() as f64 * gini(&b)) / rows.len() as f64;
            imp[c] += rows.len() as f64 * (gini(rows) - child) / root;
            reference_tree(m, y, &b, root, imp, leaves);
            reference_tree(m, y, &a, root, imp, leaves);
        }
    }
}

/// CART and single-tree FOREST importances against the exhaustive tree on
/// 20-row fixtures.
pub fn cart_oracle(seed: u64, fixtures: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..fixtures {
        let (m, y) = random_fixture(&mut rng, 20, 5);
        let all: Vec<usize> = (0..20).collect();
        let mut imp = vec![0.0; 5];
        let mut leaves = Vec::new();
        reference_tree(&m, &y, &all, 20.0, &mut imp, &mut leaves);

        let g = grow::<ChaCha8Rng>(&m, &y, &[1.0; 20], ColumnSampler::All);
        for (a, b) in g.importance.iter().zip(&imp) {
            close(*a, *b, 1e-12, "tree importance")?;
        }
        for rows in &leaves {
            let (p, n) = g.tree.leaf(&m.rows[rows[0]]);
            let want_pos = rows.iter().filter(|&&r| y[r]).count();
            if (p + n) as usize != rows.len() || p as usize != want_pos {
                return Err(format!("leaf of rows {rows:?} holds ({p}, {n})"));
            }
        }

        // One unbootstrapped tree trying every column is the same tree.
        let cfg = ForestConfig {
            trees: 1,
            seed: 9,
            bootstrap: false,
            max_features: Some(5),
        };
        let forest = forest_importance(&m, &y, &cfg).map_err(|e| e.to_string())?;
        let total: f64 = imp.iter().sum();
        for (a, b) in forest.iter().zip(&imp) {
            close(*a, b / total, 1e-12, "forest importance")?;
        }
    }
    Ok(())
}

/// Primal objective minimised by subgradient descent, as a reference value.
pub fn reference_primal(m: &SparseMatrix, y: &[bool], c: f64, iterations: usize) -> f64 {
    let d = m.n_cols + 1;
    let xs: Vec<Vec<f64>> = m
        .rows
        .iter()
        .map(|r| {
            (0..d)
                .map(|j| if j == m.n_cols || r.contains(&(j as u32)) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let ys: Vec<f64> = y.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let dot = |x: &[f64], w: &[f64]| x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
    let objective = |w: &[f64]| {
        let hinge: f64 = xs.iter().zip(&ys).map(|(x, yy)| (1.0 - yy * dot(x, w)).max(0.0)).sum();
        0.5 * dot(w, w) + c * hinge
    };
    let mut w = vec![0.0; d];
    let mut best = objective(&w);
    for t in 1..=iterations {
        let mut g = w.clone();
        for (x, yy) in xs.iter().zip(&ys) {
            if yy * dot(x, &w) < 1.0 {
                for j in 0..d {
                    g[j] -= c * yy * x[j];
                }
            }
        }
        let step = 0.5 / (t as f64).sqrt() / (1.0 + t as f64 / 1000.0);
        for j in 0..d {
            w[j] -= step * g[j];
        }
        best = best.min(objective(&w));
    }
    best
}

/// Ten-point fixtures separated by column 0: the dual objective never
/// increases and training F is 1. With `reference_iterations`, the final
/// primal is also compared with an independent minimiser.
pub fn svm_separable(seed: u64, fixtures: usize, reference_iterations: Option<usize>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..fixtures {
        let (mut m, _) = random_fixture(&mut rng, 10, 4);
        let mut y: Vec<bool> = m.rows.iter().map(|r| r.contains(&0)).collect();
        if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
            m.rows[0] = if y[0] { vec![1] } else { vec![0] };
            y[0] = !y[0];
        }
        let cfg = SvmConfig {
            tolerance: 1e-9,
            ..SvmConfig::default()
        };
        let (svm, trace) = LinearSvm::fit(&m, &y, &cfg);
        let predicted: Vec<bool> = m.rows.iter().map(|r| svm.decision(r) > 0.0).collect();
        let counts = vmwe_core::metrics::Counts::from_labels(&predicted, &y).map_err(|e| e.to_string())?;
        if counts.f1() != 1.0 {
            return Err(format!("training F {} on {:?}", counts.f1(), m.rows));
        }
        for pair in trace.windows(2) {
            if pair[1].dual > pair[0].dual + 1e-12 {
                return Err(format!("dual rose at epoch {}", pair[1].epoch));
            }
        }
        if let Some(iters) = reference_iterations {
            let last = trace.last().ok_or("empty trace")?;
            let reference = reference_primal(&m, &y, 1.0, iters);
            if last.primal > reference + 1e-6 || reference - last.primal > 1e-2 * reference {
                return Err(format!("primal {} vs reference {reference}", last.primal));
            }
        }
    }
    Ok(())
}

// Extraction ----------------------------------------------------------------

fn type_lemmas(key: &str) -> Check<Vec<String>> {
    let l: &[&str] = match key {
        "PM" => &["mesure", "prendre"],
        "AL" => &["avoir", "lieu"],
        "SR" => &["rendre", "se"],
        "FF" => &["face", "faire", "à"],
        other => return Err(format!("unknown type key {other}")),
    };
    Ok(l.iter().map(|s| s.to_string()).collect())
}

type Row = (String, Vec<u32>, Vec<String>, Label);

/// Extraction on the 50-sentence fixture against its own lexicon
/// (min_count 2) equals the hand-derived candidate list.
pub fn hand_worked_extraction() -> Check {
    let corpus = parse_cupt(EXTRACT_FIXTURE).map_err(|e| e.to_string())?;
    if corpus.len() != 50 {
        return Err(format!("{} sentences", corpus.len()));
    }
    let mut want = BTreeSet::new();
    for l in EXTRACT_EXPECTED.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let cols: Vec<&str> = l.split('\t').collect();
        let ids = cols[1].split(',').map(|x| x.parse().unwrap()).collect();
        let label = if cols[3] == "+" { Label::Positive } else { Label::Negative };
        want.insert((cols[0].to_string(), ids, type_lemmas(cols[2])?, label));
    }
    let lexicon = build_lexicon(&corpus, 2);
    let (cands, stats) = extract_candidates(&corpus, &lexicon, &ExtractionConfig::default());
    let got: BTreeSet<Row> = cands
        .iter()
        .map(|c| {
            let ty = lexicon.get(c.type_id).expect("candidate type in lexicon");
            (c.sent_id.clone(), c.token_ids.clone(), ty.lemmas.items().to_vec(), c.label)
        })
        .collect();
    if got != want || cands.len() != want.len() {
        let missing: Vec<_> = want.difference(&got).collect();
        let extra: Vec<_> = got.difference(&want).collect();
        return Err(format!("missing {missing:?}, extra {extra:?}"));
    }
    if stats.skipped_unparsed != 1 {
        return Err(format!("{} unparsed sentences skipped", stats.skipped_unparsed));
    }
    Ok(())
}

fn path_len(heads: &[u32], a: u32, b: u32) -> u32 {
    let n = heads.len();
    let mut adj = vec![Vec::new(); n + 1];
    for (i, &h) in heads.iter().enumerate() {
        if h != 0 {
            adj[i + 1].push(h as usize);
            adj[h as usize].push(i + 1);
        }
    }
    let mut dist = vec![u32::MAX; n + 1];
    dist[a as usize] = 0;
    let mut q = VecDeque::from([a as usize]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist[b as usize]
}

fn subsets(n: u32, k: usize) -> Vec<Vec<u32>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (1..=n).filter(|i| m & (1 << (i - 1)) != 0).collect())
        .collect()
}

const FUNCTION_POS: [&str; 7] = ["DET", "ADP", "PRON", "CCONJ", "SCONJ", "PART", "PUNCT"];

/// Every token subset of every sentence, filtered rule by rule.
pub fn brute_force_candidates(corpus: &[Sentence], lexicon: &Lexicon) -> BTreeSet<(String, Vec<u32>, u32, Label)> {
    let mut out = BTreeSet::new();
    for s in corpus.iter().filter(|s| s.tree().is_some()) {
        let heads: Vec<u32> = s.tokens.iter().map(|t| t.head.unwrap()).collect();
        let lemma = |i: u32| s.tokens[i as usize - 1].lemma.clone();
        let upos = |i: u32| s.tokens[i as usize - 1].upos.as_str();
        let gold: BTreeSet<Vec<u32>> = s.gold.iter().map(|g| g.token_ids.clone()).collect();
        for ty in lexicon.types() {
            let mut ok: Vec<Vec<u32>> = subsets(s.tokens.len() as u32, ty.arity())
                .into_iter()
                .filter(|ids| {
                    let mut lem: Vec<String> = ids.iter().map(|&i| lemma(i)).collect();
                    let mut pos: Vec<String> = ids.iter().map(|&i| upos(i).to_string()).collect();
                    lem.sort();
                    pos.sort();
                    lem == ty.lemmas.items() && pos == ty.pos.items()
                })
                .filter(|ids| {
                    let verbal: Vec<u32> =
                        ids.iter().copied().filter(|&i| upos(i) == "VERB" || upos(i) == "AUX").collect();
                    let nominal: Vec<u32> = ids.iter().copied().filter(|&i| upos(i) == "NOUN").collect();
                    let pair = if ids.len() == 2 {
                        Some((ids[0], ids[1]))
                    } else if verbal.len() == 1
                        && nominal.len() == 1
                        && ids
                            .iter()
                            .all(|&i| i == verbal[0] || i == nominal[0] || FUNCTION_POS.contains(&upos(i)))
                    {
                        Some((verbal[0], nominal[0]))
                    } else {
                        None
                    };
                    pair.is_none_or(|(a, b)| path_len(&heads, a, b) <= 2)
                })
                .filter(|ids| (ids[ids.len() - 1] - ids[0] + 1) as usize - ids.len() <= ty.max_insert_count)
                .collect();
            ok.sort_by_key(|ids| (ids[ids.len() - 1] - ids[0], ids.clone()));
            // Gold combinations losing on overlap are kept but block nothing.
            let mut taken: Vec<Vec<u32>> = Vec::new();
            let mut rescued = Vec::new();
            for ids in ok {
                if !taken.iter().any(|k| k.iter().any(|x| ids.contains(x))) {
                    taken.push(ids);
                } else if gold.contains(&ids) {
                    rescued.push(ids);
                }
            }
            taken.extend(rescued);
            for ids in taken {
                let label = if !s.is_annotated() {
                    Label::Unknown
                } else if gold.contains(&ids) {
                    Label::Positive
                } else {
                    Label::Negative
                };
                out.insert((s.sent_id.clone(), ids, ty.type_id, label));
            }
        }
    }
    out
}

pub fn matches_brute_force(train: &[Sentence], test: &[Sentence], min_count: usize) -> Check {
    let lexicon = build_lexicon(train, min_count);
    let config = ExtractionConfig {
        combination_cap: usize::MAX,
        ..ExtractionConfig::default()
    };
    let (cands, _) = extract_candidates(test, &lexicon, &config);
    let got: BTreeSet<_> = cands
        .iter()
        .map(|c| (c.sent_id.clone(), c.token_ids.clone(), c.type_id, c.label))
        .collect();
    if got.len() != cands.len() {
        return Err("duplicate candidates".into());
    }
    let want = brute_force_candidates(test, &lexicon);
    if got != want {
        let missing: Vec<_> = want.difference(&got).collect();
        let extra: Vec<_> = got.difference(&want).collect();
        return Err(format!("missing {missing:?}, extra {extra:?}"));
    }
    Ok(())
}

const VOCAB: [(&str, &str); 7] = [
    ("prendre", "VERB"),
    ("avoir", "AUX"),
    ("mesure", "NOUN"),
    ("lieu", "NOUN"),
    ("se", "PRON"),
    ("à", "ADP"),
    ("beau", "ADJ"),
];

/// Random annotated sentences over a small vocabulary, random trees and
/// up to two disjoint gold VMWEs each.
pub fn random_corpus(rng: &mut ChaCha8Rng, prefix: &str, sentences: usize) -> Vec<Sentence> {
    let mut text = String::new();
    for s in 0..sentences {
        let n = rng.random_range(2..8usize);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let mut head = vec![0usize; n];
        for k in 1..n {
            head[order[k]] = order[rng.random_range(0..k)] + 1;
        }
        let mut tag: BTreeMap<usize, String> = BTreeMap::new();
        for m in 1..=rng.random_range(0..3usize) {
            let size = rng.random_range(2..4usize).min(n);
            let ids: BTreeSet<usize> = (0..size).map(|_| rng.random_range(0..n)).collect();
            if ids.len() < 2 || ids.iter().any(|i| tag.contains_key(i)) {
                continue;
            }
            for (j, &i) in ids.iter().enumerate() {
                tag.insert(i, if j == 0 { format!("{m}:VID") } else { m.to_string() });
            }
        }
        text.push_str(&format!("# sent_id = {prefix}{s}\n"));
        for (i, h) in head.iter().enumerate() {
            let (lemma, upos) = VOCAB[rng.random_range(0..VOCAB.len())];
            let mwe = tag.get(&i).map_or("*", String::as_str);
            text.push_str(&format!(
                "{}\t{lemma}\t{lemma}\t{upos}\t_\t_\t{h}\tdep\t_\t_\t{mwe}\n",
                i + 1
            ));
        }
        text.push('\n');
    }
    parse_cupt(&text).expect("generated corpus parses")
}

/// Random train/test corpora checked against the brute-force scan.
pub fn random_extraction(seed: u64, rounds: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..rounds {
        let (n_train, n_test) = (rng.random_range(1..12), rng.random_range(1..12));
        let train = random_corpus(&mut rng, "tr", n_train);
        let test = random_corpus(&mut rng, "te", n_test);
        let min_count = rng.random_range(1..3);
        matches_brute_force(&train, &test, min_count).map_err(|e| format!("round {round}: {e}"))?;
    }
    Ok(())
}

/// Candidates token-identical to an attested occurrence of their type have
/// every REL feature true. Returns how many candidates were checked.
pub fn identity_property(train: &[Sentence], min_count: usize) -> Check<usize> {
    let lexicon = build_lexicon(train, min_count);
    let (cands, _) = extract_candidates(train, &lexicon, &ExtractionConfig::default());
    let mut checked = 0;
    for c in &cands {
        let sentence = train.iter().find(|s| s.sent_id == c.sent_id).ok_or("unknown sentence")?;
        let ty = lexicon.get(c.type_id).ok_or("unknown type")?;
        let attested = sentence.gold.iter().any(|g| {
            g.token_ids == c.token_ids && g.lemmas == ty.lemmas && g.pos == ty.pos
        });
        if !attested {
            continue;
        }
        let v = compute_features(c, &lexicon).map_err(|e| e.to_string())?;
        let rels: Vec<_> = v.values.iter().filter(|(f, _)| f.kind() == FeatureKind::Rel).collect();
        if rels.is_empty() {
            return Err(format!("{} {:?}: no REL features", c.sent_id, c.token_ids));
        }
        if let Some((f, _)) = rels.iter().find(|(_, x)| **x != FeatureValue::Bool(true)) {
            return Err(format!("{} {:?}: {f} is false", c.sent_id, c.token_ids));
        }
        checked += 1;
    }
    Ok(checked)
}

/// [`identity_property`] over random corpora.
pub fn random_identity(seed: u64, rounds: usize) -> Check<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0;
    for _ in 0..rounds {
        let n = rng.random_range(2..15);
        let train = random_corpus(&mut rng, "tr", n);
        total += identity_property(&train, 1)?;
    }
    Ok(total)
}
