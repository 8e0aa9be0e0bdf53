#!/usr/bin/env python3
"""Writes external/es_synth.test.tsv: predictions of a simulated tagger for
the test split of es_synth (sentences 101-160 under the first-n 80/20/60
split), with occasional wrong lemmas and one malformed line."""

import pathlib
import random

here = pathlib.Path(__file__).resolve().parent
rng = random.Random(11)
sentences, cur = [], []
for line in (here.parent / "fixtures" / "es_synth.conllu").read_text(encoding="utf-8").splitlines():
    if not line:
        if cur:
            sentences.append(cur)
        cur = []
        continue
    cols = line.split("\t")
    if line.startswith("#") or "-" in cols[0] or "." in cols[0]:
        continue
    cur.append((cols[1], cols[2]))
if cur:
    sentences.append(cur)

out = ["# system = tagger-sim", "# note = simulated sequence tagger output"]
for n, sent in enumerate(sentences[100:160], 101):
    out.append("")
    out.append(f"# sent_id = es_synth-{n}")
    for form, lemma in sent:
        if rng.random() < 0.04:
            lemma = form.lower()
        out.append(f"{form}\t{lemma}")
    if n == 117:
        out.append("this line is not a pair")
(here / "external" / "es_synth.test.tsv").write_text("\n".join(out) + "\n", encoding="utf-8")
