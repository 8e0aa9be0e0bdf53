#!/usr/bin/env python3
"""Generates the synthetic CoNLL-U fixture corpora and their pinned stats.

The corpora mimic UD treebanks (multiword tokens, empty nodes, comments,
sentence-initial capitals, irregular morphology) but are produced from small
hand-written grammars so they can be shipped without licensing concerns.
Output is deterministic for a given seed. Token counts in stats.pinned.tsv
are computed here, independently of the C++ reader: syntactic words only,
i.e. multiword-token range lines and empty nodes are not counted.
"""

import argparse
import pathlib
import random

# --- Spanish -------------------------------------------------------------

ES_NOUNS = [  # (singular, plural, gender)
    ("casa", "casas", "f"), ("perro", "perros", "m"), ("ciudad", "ciudades", "f"),
    ("libro", "libros", "m"), ("mujer", "mujeres", "f"), ("niño", "niños", "m"),
    ("árbol", "árboles", "m"), ("canción", "canciones", "f"), ("lápiz", "lápices", "m"),
    ("mesa", "mesas", "f"), ("gato", "gatos", "m"), ("río", "ríos", "m"),
    ("tren", "trenes", "m"), ("país", "países", "m"), ("universidad", "universidades", "f"),
    ("profesor", "profesores", "m"), ("ventana", "ventanas", "f"), ("pueblo", "pueblos", "m"),
    ("carta", "cartas", "f"), ("jardín", "jardines", "m"), ("noche", "noches", "f"),
    ("hombre", "hombres", "m"), ("flor", "flores", "f"), ("pez", "peces", "m"),
]
ES_ADJ = [  # (masc sg, fem sg, masc pl, fem pl) - lemma is masc sg
    ("rojo", "roja", "rojos", "rojas"), ("nuevo", "nueva", "nuevos", "nuevas"),
    ("pequeño", "pequeña", "pequeños", "pequeñas"), ("viejo", "vieja", "viejos", "viejas"),
    ("grande", "grande", "grandes", "grandes"), ("feliz", "feliz", "felices", "felices"),
    ("azul", "azul", "azules", "azules"), ("hermoso", "hermosa", "hermosos", "hermosas"),
    ("alemán", "alemana", "alemanes", "alemanas"),
]
# lemma: (3sg present, 3pl present, 3sg preterite, 3pl preterite, 3sg imperfect)
ES_VERBS = {
    "hablar": ("habla", "hablan", "habló", "hablaron", "hablaba"),
    "comer": ("come", "comen", "comió", "comieron", "comía"),
    "vivir": ("vive", "viven", "vivió", "vivieron", "vivía"),
    "ver": ("ve", "ven", "vio", "vieron", "veía"),
    "tener": ("tiene", "tienen", "tuvo", "tuvieron", "tenía"),
    "hacer": ("hace", "hacen", "hizo", "hicieron", "hacía"),
    "poder": ("puede", "pueden", "pudo", "pudieron", "podía"),
    "decir": ("dice", "dicen", "dijo", "dijeron", "decía"),
    "escribir": ("escribe", "escriben", "escribió", "escribieron", "escribía"),
    "leer": ("lee", "leen", "leyó", "leyeron", "leía"),
    "encontrar": ("encuentra", "encuentran", "encontró", "encontraron", "encontraba"),
    "querer": ("quiere", "quieren", "quiso", "quisieron", "quería"),
    "buscar": ("busca", "buscan", "buscó", "buscaron", "buscaba"),
    "abrir": ("abre", "abren", "abrió", "abrieron", "abría"),
}
ES_INTRANS = {
    "ir": ("va", "van", "fue", "fueron", "iba"),
    "venir": ("viene", "vienen", "vino", "vinieron", "venía"),
    "dormir": ("duerme", "duermen", "durmió", "durmieron", "dormía"),
    "llegar": ("llega", "llegan", "llegó", "llegaron", "llegaba"),
    "salir": ("sale", "salen", "salió", "salieron", "salía"),
}
ES_ADV = ["hoy", "ayer", "siempre", "también", "pronto", "mañana", "aquí", "nunca"]
ES_PROPN = ["María", "Juan", "Madrid", "Lucía", "Pedro", "Sevilla", "Ana"]
ES_DET = {  # kind -> (m sg, f sg, m pl, f pl), lemma
    "def": (("el", "la", "los", "las"), "el"),
    "indef": (("un", "una", "unos", "unas"), "uno"),
    "dem": (("este", "esta", "estos", "estas"), "este"),
    "poss": (("su", "su", "sus", "sus"), "su"),
}


def agree(forms, gender, plural):
    return forms[(2 if plural else 0) + (1 if gender == "f" else 0)]


class Builder:
    def __init__(self):
        self.words = []  # (form, lemma, upos)
        self.mwt = []  # (start index 1-based, surface)

    def add(self, form, lemma, upos):
        self.words.append((form, lemma, upos))

    def contraction(self, prep, surface):
        start = len(self.words) + 1
        self.add(prep, prep, "ADP")
        self.add("el", "el", "DET")
        self.mwt.append((start, surface))


def es_np(b, rng, allow_contraction_with=None):
    noun, plural_form, gender = rng.choice(ES_NOUNS)
    plural = rng.random() < 0.4
    kind = rng.choice(["def", "def", "indef", "dem", "poss"])
    forms, det_lemma = ES_DET[kind]
    det = agree(forms, gender, plural)
    if allow_contraction_with and det == "el":
        b.contraction(allow_contraction_with, "del" if allow_contraction_with == "de" else "al")
    else:
        if allow_contraction_with:
            b.add(allow_contraction_with, allow_contraction_with, "ADP")
        b.add(det, det_lemma, "DET")
    b.add(plural_form if plural else noun, noun, "NOUN")
    if rng.random() < 0.45:
        adj = rng.choice(ES_ADJ)
        b.add(agree(adj, gender, plural), adj[0], "ADJ")
    return plural, gender


def es_verb(b, rng, table, plural):
    lemma = rng.choice(sorted(table))
    forms = table[lemma]
    tense = rng.choice(["pres", "pret", "impf"])
    if tense == "pres":
        form = forms[1] if plural else forms[0]
    elif tense == "pret":
        form = forms[3] if plural else forms[2]
    else:
        form = forms[4] + ("n" if plural else "")
    b.add(form, lemma, "VERB")


def es_sentence(rng):
    b = Builder()
    pattern = rng.randrange(5)
    if pattern == 0:
        plural, _ = es_np(b, rng)
        es_verb(b, rng, ES_VERBS, plural)
        es_np(b, rng)
        es_np(b, rng, allow_contraction_with="de")
    elif pattern == 1:
        b.add(rng.choice(ES_PROPN), None, "PROPN")
        es_verb(b, rng, ES_INTRANS, False)
        es_np(b, rng, allow_contraction_with="a")
        b.add(rng.choice(ES_ADV), None, "ADV")
    elif pattern == 2:
        b.add(rng.choice(ES_ADV), None, "ADV")
        plural, _ = es_np(b, rng)
        es_verb(b, rng, ES_VERBS, plural)
        es_np(b, rng)
        b.add(",", ",", "PUNCT")
        b.add("pero", "pero", "CCONJ")
        b.add("no", "no", "ADV")
        es_verb(b, rng, ES_INTRANS, plural)
    elif pattern == 3:
        plural, gender = es_np(b, rng)
        b.add("son" if plural else "es", "ser", "AUX")
        adj = rng.choice(ES_ADJ)
        b.add(agree(adj, gender, plural), adj[0], "ADJ")
        b.add("y", "y", "CCONJ")
        adj = rng.choice(ES_ADJ)
        b.add(agree(adj, gender, plural), adj[0], "ADJ")
    else:
        b.add(rng.choice(ES_PROPN), None, "PROPN")
        b.add("y", "y", "CCONJ")
        b.add(rng.choice(ES_PROPN), None, "PROPN")
        es_verb(b, rng, ES_VERBS, True)
        es_np(b, rng)
        es_np(b, rng, allow_contraction_with="de")
    b.add(rng.choice([".", ".", ".", "!"]), None, "PUNCT")
    return b


# --- English -------------------------------------------------------------

EN_NOUNS = [("child", "children"), ("book", "books"), ("woman", "women"), ("mouse", "mice"),
            ("city", "cities"), ("knife", "knives"), ("dog", "dogs"), ("letter", "letters"),
            ("person", "people"), ("house", "houses"), ("leaf", "leaves")]
EN_VERBS = {  # lemma: (3sg, past, past participle)
    "choose": ("chooses", "chose", "chosen"), "write": ("writes", "wrote", "written"),
    "see": ("sees", "saw", "seen"), "take": ("takes", "took", "taken"),
    "find": ("finds", "found", "found"), "read": ("reads", "read", "read"),
    "buy": ("buys", "bought", "bought"), "carry": ("carries", "carried", "carried"),
    "give": ("gives", "gave", "given"), "lose": ("loses", "lost", "lost"),
}
EN_ADJ = [("big", "bigger"), ("old", "older"), ("happy", "happier"), ("good", "better"), ("small", "smaller")]


def en_sentence(rng):
    b = Builder()

    def np():
        sg, pl = rng.choice(EN_NOUNS)
        plural = rng.random() < 0.5
        b.add(rng.choice(["the", "the", "these" if plural else "this"]), None, "DET")
        if rng.random() < 0.4:
            base, comp = rng.choice(EN_ADJ)
            b.add(comp if rng.random() < 0.5 else base, base, "ADJ")
        b.add(pl if plural else sg, sg, "NOUN")
        return plural

    plural = np()
    verb = rng.choice(sorted(EN_VERBS))
    s3, past, part = EN_VERBS[verb]
    choice = rng.randrange(3)
    if choice == 0:
        b.add(verb if plural else s3, verb, "VERB")
    elif choice == 1:
        b.add(past, verb, "VERB")
    else:
        b.add("have" if plural else "has", "have", "AUX")
        b.add(part, verb, "VERB")
    np()
    if rng.random() < 0.3:
        b.add("and", "and", "CCONJ")
        b.add("did", "do", "AUX")
        b.add("n't", "not", "PART")
        b.add("stop", "stop", "VERB")
    b.add(".", ".", "PUNCT")
    return b


# --- Basque --------------------------------------------------------------

EU_NOUNS = ["etxe", "gizon", "liburu", "mendi", "ume", "emakume", "herri", "txakur"]
EU_CASES = [("a", "abs"), ("ak", "erg"), ("ean", "ine"), ("ko", "gen"), ("ra", "all"), ("tik", "abl")]
EU_VERBS = [("egingo", "egin"), ("egin", "egin"), ("ikusi", "ikusi"), ("ikusiko", "ikusi"),
            ("erosi", "erosi"), ("eramango", "eraman"), ("idatzi", "idatzi"), ("etorri", "etorri")]
EU_AUX = [("dut", "*edun"), ("du", "*edun"), ("ditu", "*edun"), ("dira", "izan"), ("da", "izan"), ("zuen", "*edun")]
EU_ADJ = ["handi", "txiki", "berri", "zahar", "polit"]


def eu_form(stem, suffix):
    # stems ending in -a would elide; all stems here end in other vowels or consonants
    if stem[-1] not in "aeiou" and suffix.startswith(("a", "ean")):
        return stem + suffix if suffix != "ean" else stem + "ean"
    if stem[-1] not in "aeiou" and suffix in ("ko", "ra", "tik"):
        return stem + {"ko": "eko", "ra": "era", "tik": "etik"}[suffix]
    return stem + suffix


def eu_sentence(rng):
    b = Builder()
    for _ in range(rng.randint(1, 2)):
        stem = rng.choice(EU_NOUNS)
        if rng.random() < 0.4:
            b.add(stem, stem, "NOUN")
            adj = rng.choice(EU_ADJ)
            suffix, _ = rng.choice(EU_CASES)
            b.add(eu_form(adj, suffix), adj, "ADJ")
        else:
            suffix, _ = rng.choice(EU_CASES)
            b.add(eu_form(stem, suffix), stem, "NOUN")
    form, lemma = rng.choice(EU_VERBS)
    b.add(form, lemma, "VERB")
    form, lemma = rng.choice(EU_AUX)
    b.add(form, lemma, "AUX")
    b.add(".", ".", "PUNCT")
    return b


# --- output --------------------------------------------------------------


def capitalize_first(words):
    form, lemma, upos = words[0]
    if upos != "PROPN":
        words[0] = (form[0].upper() + form[1:], lemma if lemma is not None else form, upos)


def write_conllu(path, name, builders, rng, empty_node_every=0):
    tokens = 0
    lines = [f"# generated by generate_fixtures.py ({name})"]
    for n, b in enumerate(builders, 1):
        words = [(f, l if l is not None else f, u) for f, l, u in b.words]
        capitalize_first(words)
        surface = []
        mwt = dict(b.mwt)
        i = 0
        while i < len(words):
            if i + 1 in mwt:
                surface.append(mwt[i + 1])
                i += 2
            else:
                surface.append(words[i][0])
                i += 1
        if surface and surface[0][0].islower():
            surface[0] = surface[0][0].upper() + surface[0][1:]
        lines.append(f"# sent_id = {name}-{n:04d}")
        lines.append("# text = " + " ".join(surface))
        for idx, (form, lemma, upos) in enumerate(words, 1):
            if idx in mwt:
                s = mwt[idx]
                if idx == 1:
                    s = s[0].upper() + s[1:]
                lines.append(f"{idx}-{idx + 1}\t{s}\t_\t_\t_\t_\t_\t_\t_\t_")
            head = 0 if idx == 1 else 1
            rel = "root" if idx == 1 else "dep"
            lines.append(f"{idx}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_")
            if empty_node_every and n % empty_node_every == 0 and idx == 1:
                lines.append(f"{idx}.1\t_\t_\tVERB\t_\t_\t_\t_\t1:orphan\t_")
        lines.append("")
        tokens += len(words)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return tokens, len(builders)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent))
    ap.add_argument("--seed", type=int, default=20240501)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    rng = random.Random(args.seed)

    specs = [
        ("es_synth", "es", es_sentence, 160, 7, None),
        ("en_synth", "en", en_sentence, 60, 0, 40),  # reduced to the first 40 in the configs
        ("eu_synth", "eu", eu_sentence, 50, 0, None),
    ]
    rows = []
    for name, lang, gen, count, empty_every, reduce_to in specs:
        builders = [gen(rng) for _ in range(count)]
        tokens, sentences = write_conllu(out / f"{name}.conllu", name, builders, rng, empty_every)
        if reduce_to is not None:
            kept = builders[:reduce_to]
            tokens, sentences = sum(len(b.words) for b in kept), len(kept)
            reduction = f"first-n {reduce_to}"
        else:
            reduction = "none"
        rows.append(f"{name}\t{lang}\t{reduction}\t{tokens}\t{sentences}")
    (out / "stats.pinned.tsv").write_text(
        "corpus\tlanguage\treduction\ttokens\tsentences\n" + "\n".join(rows) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
