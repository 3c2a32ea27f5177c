#!/usr/bin/env python3
"""Independent reference for criterion 1: generates randomized (run, qrels)
fixtures and computes MAP, P@10/20/30, and 11-point interpolated precision
with trec_eval's conventions (evaluate every judged topic with R > 0,
topics missing from the run contribute zeros, fixed-denominator P@k).

Scores within a topic are strictly decreasing so ranking is tie-free and
any correct implementation must agree exactly.

Writes fixture{i}.{run,qrels,expected} under crates/lab/tests/data/.
"""

import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "lab" / "tests" / "data"
LEVELS = [i / 10 for i in range(11)]


def ap(ranked_rel, R):
    if R == 0:
        return None
    hits = 0
    total = 0.0
    for i, rel in enumerate(ranked_rel, start=1):
        if rel:
            hits += 1
            total += hits / i
    return total / R


def p_at(ranked_rel, k):
    return sum(ranked_rel[:k]) / k


def iprec(ranked_rel, R):
    # Precision/recall points at every rank, then max over recall >= level.
    points = []
    hits = 0
    for i, rel in enumerate(ranked_rel, start=1):
        if rel:
            hits += 1
            points.append((hits / R, hits / i))
    out = []
    for level in LEVELS:
        best = max((p for r, p in points if r + 1e-12 >= level), default=0.0)
        out.append(best)
    return out


def evaluate(run, qrels):
    """run: {topic: [(score, pmid)]}, qrels: {topic: {pmid: rel}}."""
    per_topic = {}
    for topic, judged in sorted(qrels.items()):
        R = sum(judged.values())
        if R == 0:
            continue
        ranked = sorted(run.get(topic, []), key=lambda e: -e[0])
        ranked_rel = [judged.get(pmid, 0) for _, pmid in ranked]
        per_topic[topic] = {
            "ap": ap(ranked_rel, R),
            "p10": p_at(ranked_rel, 10),
            "p20": p_at(ranked_rel, 20),
            "p30": p_at(ranked_rel, 30),
            "iprec": iprec(ranked_rel, R),
        }
    n = len(per_topic)
    agg = {
        "ap": sum(m["ap"] for m in per_topic.values()) / n,
        "p10": sum(m["p10"] for m in per_topic.values()) / n,
        "p20": sum(m["p20"] for m in per_topic.values()) / n,
        "p30": sum(m["p30"] for m in per_topic.values()) / n,
        "iprec": [sum(m["iprec"][j] for m in per_topic.values()) / n for j in range(11)],
    }
    return per_topic, agg


def make_fixture(i, rng):
    topics = [f"CD{i}{t:03}" for t in range(rng.randint(5, 8))]
    qrels = {}
    run = {}
    pool = list(range(10000, 99999))
    for t, topic in enumerate(topics):
        judged_pmids = rng.sample(pool, rng.randint(30, 60))
        judged = {str(p): (1 if rng.random() < 0.3 else 0) for p in judged_pmids}
        if i == 3 and t == 1:
            judged = {p: 0 for p in judged}  # an all-zero topic is skipped
        elif all(v == 0 for v in judged.values()):
            judged[str(judged_pmids[0])] = 1
        qrels[topic] = judged
        if i == 4 and t == 2:
            continue  # judged topic missing from the run scores zero
        retrieved = rng.sample(list(judged), rng.randint(20, len(judged)))
        retrieved += [str(p) for p in rng.sample(pool, rng.randint(20, 40))]
        rng.shuffle(retrieved)
        score = 20.0
        entries = []
        for pmid in retrieved:
            score -= rng.randint(1, 999) / 10000
            entries.append((round(score, 6), pmid))
        run[topic] = entries
    return run, qrels


def render(i, run, qrels):
    run_lines = []
    for topic in sorted(run):
        for rank, (score, pmid) in enumerate(run[topic], start=1):
            run_lines.append(f"{topic} Q0 {pmid} {rank} {score:.6f} oracle")
    qrels_lines = [
        f"{topic} 0 {pmid} {rel}"
        for topic in sorted(qrels)
        for pmid, rel in sorted(qrels[topic].items())
    ]
    per_topic, agg = evaluate(run, qrels)
    expected = []
    for topic, m in sorted(per_topic.items()):
        expected.append(f"map\t{topic}\t{m['ap']:.10f}")
    for key, name in [("ap", "map"), ("p10", "P_10"), ("p20", "P_20"), ("p30", "P_30")]:
        expected.append(f"{name}\tall\t{agg[key]:.10f}")
    for level, value in zip(LEVELS, agg["iprec"]):
        expected.append(f"iprec_at_recall_{level:.2f}\tall\t{value:.10f}")
    (OUT / f"fixture{i}.run").write_text("\n".join(run_lines) + "\n")
    (OUT / f"fixture{i}.qrels").write_text("\n".join(qrels_lines) + "\n")
    (OUT / f"fixture{i}.expected").write_text("\n".join(expected) + "\n")
    n_docs = sum(len(v) for v in run.values())
    print(f"fixture{i}: {len(qrels)} topics, {n_docs} run entries, map={agg['ap']:.6f}")
    assert n_docs >= 200, n_docs


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for i in range(1, 6):
        rng = random.Random(1000 + i)
        run, qrels = make_fixture(i, rng)
        render(i, run, qrels)


if __name__ == "__main__":
    main()
