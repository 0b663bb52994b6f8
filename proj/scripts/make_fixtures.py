#!/usr/bin/env python3
"""Regenerates the synthetic resource fixtures under fixtures/.

Everything is seeded, so rerunning produces byte-identical files.
"""
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

NOUNS = ["bank", "river", "money", "account", "shore", "water", "plant", "factory", "tree",
         "leaf", "light", "lamp", "sun", "date", "heritage", "war", "fight", "battle",
         "conflict", "book", "novel", "chair", "table", "seat", "house", "home", "car",
         "vehicle", "road", "street", "letter", "note", "party", "meeting", "bar", "rod"]
VERBS = ["run", "manage", "operate", "jog", "check", "verify", "examine", "inspect", "make",
         "get", "see", "watch", "read", "study", "write", "buy", "purchase", "love", "adore",
         "cherish", "keep", "hold"]
ADJS = ["bright", "clever", "smart", "dry", "arid", "dull", "boring", "big", "large", "happy",
        "glad", "good", "right", "correct", "old", "ancient", "quiet", "calm"]
ADVS = ["quickly", "fast", "rapidly", "slowly", "often", "rarely"]
FUNCTION = ["the", "a", "an", "of", "in", "on", "at", "to", "and", "was", "is", "he", "she",
            "they", "it", "we", "i", "you", "by", "with", "for", "from", "this", "that", "his",
            "her", "near", "after", "before", "every", "each", "some", "our"]
INFLECTED = {"banks": ("NOUN", "bank"), "checked": ("VERB", "check"), "runs": ("VERB", "run"),
             "loved": ("VERB", "love"), "books": ("NOUN", "book"), "made": ("VERB", "make")}


def write(name, text):
    path = ROOT / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def lexicon():
    rows = []
    for pos, words in (("NOUN", NOUNS), ("VERB", VERBS), ("ADJ", ADJS), ("ADV", ADVS)):
        rows += [f"{w}\t{pos}" for w in words]
    rows += [f"{w}\tOTHER" for w in FUNCTION]
    rows += [f"{form}\t{pos}\t{lemma}" for form, (pos, lemma) in sorted(INFLECTED.items())]
    write("lexicon.tsv", "\n".join(rows) + "\n")


def stoplist():
    ranked = FUNCTION + ["make", "get", "good"]
    write("stoplist.txt", "\n".join(ranked) + "\n")


def usim():
    rows = [
        ("check", "VERB", "She <strong>checked</strong> the figures twice .",
         "He <strong>checked</strong> every answer before leaving .", "4.3"),
        ("dry", "ADJ", "The towels were finally <strong>dry</strong> .",
         "His humour was very <strong>dry</strong> and quiet .", "1.3"),
        ("bank", "NOUN", "The <strong>bank</strong> raised its fees .",
         "We sat on the <strong>bank</strong> of the river .", "1.0"),
        ("bank", "NOUN", "The <strong>bank</strong> closed my account .",
         "Her <strong>bank</strong> lent them money .", "4.8"),
        ("light", "NOUN", "Turn on the <strong>light</strong> please .",
         "The <strong>light</strong> in the kitchen is bright .", "4.5"),
        ("light", "NOUN", "The <strong>light</strong> of reason guided him .",
         "A <strong>light</strong> hung over the table .", "3.0"),
        ("run", "VERB", "They <strong>run</strong> a small factory .",
         "Children <strong>run</strong> fast in the park .", "1.7"),
        ("run", "VERB", "She will <strong>run</strong> the meeting .",
         "He can <strong>run</strong> the whole company .", "4.1"),
        ("party", "NOUN", "The <strong>party</strong> won the election .",
         "We had a <strong>party</strong> at home .", "1.2"),
        ("plant", "NOUN", "The <strong>plant</strong> needs water .",
         "This <strong>plant</strong> grows by the window .", "4.6"),
        ("plant", "NOUN", "The power <strong>plant</strong> was closed .",
         "A green <strong>plant</strong> stood in the corner .", "2.0"),
        ("note", "NOUN", "He left a <strong>note</strong> on the table .",
         "She wrote a short <strong>note</strong> to her friend .", "4.0"),
    ]
    write("usim.tsv", "".join("\t".join(r) + "\n" for r in rows))


COINCO = {
    "war": ["fight", "battle", "conflict", "combat", "struggle", "clash", "hostility"],
    "right": ["correct", "proper", "just", "fair", "entitlement", "privilege", "claim"],
    "bright": ["clever", "smart", "shiny", "brilliant", "radiant", "intelligent", "vivid"],
    "bank": ["shore", "edge", "lender", "institution", "side", "treasury", "embankment"],
}


def coinco():
    rng = random.Random(3)
    senses = {
        "war": [["fight", "battle", "conflict", "combat", "struggle", "clash"],
                ["hostility", "struggle", "conflict", "campaign"]],
        "right": [["correct", "proper", "accurate", "true"],
                  ["entitlement", "privilege", "claim", "prerogative"]],
        "bright": [["clever", "smart", "intelligent", "brilliant"],
                   ["shiny", "radiant", "vivid", "luminous"]],
        "bank": [["lender", "institution", "treasury", "firm"],
                 ["shore", "edge", "side", "embankment"]],
    }
    templates = {
        "war": ["The <strong>war</strong> lasted for years .", "They fought a long <strong>war</strong> ."],
        "right": ["That answer is <strong>right</strong> .", "Voting is a basic <strong>right</strong> ."],
        "bright": ["She is a <strong>bright</strong> student .", "The lamp is very <strong>bright</strong> ."],
        "bank": ["The <strong>bank</strong> approved the loan .", "They walked along the <strong>bank</strong> ."],
    }
    pos = {"war": "NOUN", "right": "ADJ", "bright": "ADJ", "bank": "NOUN"}
    rows = []
    k = 0
    for lemma in sorted(senses):
        for sense, subs in enumerate(senses[lemma]):
            for _ in range(5):
                chosen = rng.sample(subs, rng.randint(2, len(subs)))
                sentence = templates[lemma][sense]
                rows.append(f"{k}\t{lemma}\t{pos[lemma]}\t{sentence}\t{';'.join(chosen)}")
                k += 1
    write("coinco.tsv", "\n".join(rows) + "\n")


def wic():
    rows = [
        ("sale", "N", "0-3", "Sale is a good deal .", "They made a sale to the bank .", "T"),
        ("answer", "V", "1-1", "I answer the letter .", "She answer the door quietly .", "F"),
        ("bank", "N", "1-4", "The bank closed early .", "He sat on the bank of the river .", "F"),
        ("run", "V", "1-1", "They run a factory .", "We run the shop together .", "T"),
        ("light", "N", "3-1", "Switch on the light .", "The light is bright .", "T"),
        ("dry", "A", "3-3", "The paint is dry now .", "His wit is dry and calm .", "F"),
    ]
    write("wic/train.data.txt", "".join("\t".join(r[:5]) + "\n" for r in rows))
    write("wic/train.gold.txt", "".join(r[5] + "\n" for r in rows))


def opusparcus():
    topics = {
        "love": ["I love you so much .", "I really love you .", "You know I love you .",
                 "We love this old house .", "They love the quiet road ."],
        "car": ["The car is outside .", "Your car is parked outside .", "That car was fast .",
                "His car broke down on the road .", "Her car is very old ."],
        "book": ["Read the book tonight .", "Please read that book tonight .",
                 "The book is on the table .", "She wrote a book about war .",
                 "This book is boring ."],
        "river": ["The river is calm .", "This river is very calm .", "We swam in the river .",
                  "The river flooded the street .", "A river runs near our home ."],
        "money": ["He lost the money .", "He lost all his money .", "Money cannot buy love .",
                  "They need money for the house .", "The bank kept our money ."],
    }
    rng = random.Random(5)
    rows = []
    k = 0
    for word in sorted(topics):
        s = topics[word]
        rows.append((f"op{k}", s[0], s[1], f"{rng.uniform(20, 77):.2f}")); k += 1
        rows.append((f"op{k}", s[2], s[3], f"{rng.uniform(2, 15):.2f}")); k += 1
        rows.append((f"op{k}", s[1], s[4], f"{rng.uniform(16, 40):.2f}")); k += 1
    frames = ["the {w} is here .", "i saw the {w} today .", "that {w} was {a} .",
              "we like this {w} .", "our {w} looks {a} .", "they found a {w} near the road ."]
    for word in ["bank", "water", "plant", "tree", "lamp", "sun", "chair", "table", "house",
                 "street", "letter", "party", "novel", "seat", "shore", "factory", "leaf",
                 "note", "bar", "meeting"]:
        variants = [f.format(w=word, a=rng.choice(ADJS)) for f in frames]
        for i in range(0, 6, 2):
            rows.append((f"op{k}", variants[i], variants[i + 1], f"{rng.uniform(16, 77):.2f}")); k += 1
        rows.append((f"op{k}", variants[1], variants[2], f"{rng.uniform(2, 14):.2f}")); k += 1
    rows.append((f"op{k}", "Let us make dinner .", "We should make dinner now .", "50.00")); k += 1
    rows.append((f"op{k}", "Exactly fifteen .", "Fifteen exactly .", "15.00")); k += 1
    write("opusparcus.tsv", "".join("\t".join(r) + "\n" for r in rows))


def ppdb():
    pairs = [
        ("bank", "shore", 3.1), ("bank", "lender", 3.4), ("bank", "institution", 2.6),
        ("river", "stream", 3.0), ("money", "cash", 3.8), ("money", "funds", 3.2),
        ("light", "lamp", 2.9), ("light", "glow", 2.4), ("house", "home", 3.5),
        ("car", "vehicle", 3.6), ("car", "auto", 3.3), ("road", "street", 3.7),
        ("book", "novel", 3.2), ("book", "volume", 2.8), ("chair", "seat", 3.4),
        ("war", "battle", 3.3), ("war", "conflict", 3.5), ("battle", "fight", 3.6),
        ("fight", "conflict", 2.7), ("bright", "clever", 2.8), ("bright", "smart", 3.1),
        ("bright", "shiny", 2.9), ("dry", "arid", 3.4), ("dry", "dull", 2.2),
        ("big", "large", 3.9), ("happy", "glad", 3.6), ("old", "ancient", 3.0),
        ("quiet", "calm", 3.2), ("quickly", "fast", 3.4), ("quickly", "rapidly", 3.7),
        ("run", "manage", 3.0), ("run", "operate", 2.9), ("run", "jog", 3.3),
        ("check", "verify", 3.5), ("check", "examine", 3.1), ("check", "inspect", 3.2),
        ("see", "watch", 2.6), ("read", "study", 2.5), ("buy", "purchase", 3.9),
        ("love", "adore", 3.4), ("love", "cherish", 3.0), ("keep", "hold", 2.7),
        ("letter", "note", 2.9), ("party", "meeting", 2.1), ("table", "chart", 1.5),
        ("bar", "rod", 2.4), ("tree", "plant", 1.8), ("kick the bucket", "die", 3.0),
    ]
    write("ppdb.tsv", "".join(f"{a}\t{b}\t{s}\n" for a, b, s in pairs))


def corpus():
    rng = random.Random(11)
    content_n = ["bank", "river", "money", "house", "car", "road", "book", "chair", "war",
                 "light", "letter", "party", "tree", "table", "bar"]
    content_v = ["run", "check", "see", "read", "buy", "love", "keep"]
    content_a = ["bright", "dry", "big", "happy", "old", "quiet"]
    templates = [
        "the {a} {n} was near the {n2} .",
        "they {v} the {n} every day .",
        "we {v} a {a} {n} in the {n2} .",
        "she saw the {n} and the {n2} .",
        "his {n} is {a} .",
        "the {n} moved quickly past the {n2} .",
    ]
    lines = []
    for _ in range(240):
        t = rng.choice(templates)
        lines.append(t.format(a=rng.choice(content_a), n=rng.choice(content_n),
                              n2=rng.choice(content_n), v=rng.choice(content_v)))
    write("corpus.txt", "\n".join(lines) + "\n")


def legacy():
    pair = {
        "id": "legacy-0", "source": "USIM", "lang": "en", "label": "T", "graded_score": 4.8,
        "s1": "The bank closed my account .",
        "t1": {"start": 4, "end": 8, "lemma": "bank", "pos": "NOUN"},
        "s2": "Her bank lent them money .",
        "t2": {"start": 4, "end": 8, "lemma": "bank", "pos": "NOUN"},
    }
    other = {
        "id": "legacy-1", "source": "COINCO", "lang": "en", "label": "F", "graded_score": None,
        "s1": "The seat by the window is free .",
        "t1": {"start": 4, "end": 8, "lemma": "seat", "pos": "NOUN"},
        "s2": "She won a seat in parliament .",
        "t2": {"start": 10, "end": 14, "lemma": "seat", "pos": "NOUN"},
    }
    write("legacy.jsonl", "".join(json.dumps(p, ensure_ascii=False) + "\n" for p in (pair, other)))


EN_PAIRS = [("bank", "river"), ("money", "account"), ("car", "road"), ("book", "letter"),
            ("war", "battle"), ("light", "sun"), ("tree", "leaf"), ("chair", "table"),
            ("house", "home"), ("party", "meeting"), ("plant", "factory"), ("water", "shore"),
            ("bar", "rod"), ("note", "letter"), ("date", "heritage"), ("street", "vehicle"),
            ("novel", "book"), ("seat", "chair"), ("lamp", "light"), ("fight", "conflict")]
EN_FRAMES = [
    "Yesterday the {a} was next to the {b} in our town .",
    "Nobody expected the {a} to matter more than the {b} .",
    "In the story , a {a} slowly turns into a {b} by the end .",
    "She said the {a} and the {b} were both quite old .",
    "After the storm , the {b} looked different from the {a} .",
    "His {a} reminded everyone of a {b} they had seen before .",
    "The report compared the {a} with the {b} in detail .",
    "We found a {b} near the {a} on the hill .",
]

FI_PAIRS = [("talo", "koti"), ("kirja", "kirje"), ("auto", "tie"), ("joki", "ranta"),
            ("raha", "pankki"), ("sota", "taistelu"), ("valo", "lamppu"), ("puu", "lehti"),
            ("tuoli", "pöytä"), ("järvi", "metsä"), ("yö", "päivä"), ("sää", "lämpö")]
FI_FRAMES = [
    "Eilen {a} oli lähellä {b} meidän kylässä .",
    "Kukaan ei uskonut että {a} ja {b} olisivat tärkeitä .",
    "Tarinassa {a} muuttuu hitaasti {b} .",
    "Hänen mielestään {b} oli kauniimpi kuin {a} .",
]


def mark(word):
    return f"<strong>{word}</strong>"


def gwsc_rows(pairs, frames, n, rng, inflect=False):
    rows = []
    for i in range(n):
        a, b = pairs[i % len(pairs)]
        f1, f2 = rng.sample(frames, 2)
        sa = a + "s" if inflect and i % 17 == 5 else a
        rows.append((a, b, f1.format(a=mark(sa), b=mark(b)), f2.format(a=mark(a), b=mark(b))))
    return rows


def write_gwsc(name, rows, header=True):
    text = "word1\tword2\tcontext1\tcontext2\n" if header else ""
    text += "".join("\t".join(r) + "\n" for r in rows)
    write(name, text)


def gwsc():
    rng = random.Random(17)
    en = gwsc_rows(EN_PAIRS, EN_FRAMES, 340, rng, inflect=True)
    write_gwsc("gwsc/en_subtask2.tsv", en)
    gold2 = ["sim_context1\tsim_context2"]
    for _ in en:
        gold2.append(f"{rng.uniform(0, 10):.2f}\t{rng.uniform(0, 10):.2f}")
    write("gwsc/en_subtask2.gold.tsv", "\n".join(gold2) + "\n")

    gold1 = ["change"] + [f"{rng.uniform(-5, 5):.2f}" for _ in en]
    write_gwsc("gwsc/en_subtask1.tsv", en)
    write("gwsc/en_subtask1.gold.tsv", "\n".join(gold1) + "\n")

    fi = gwsc_rows(FI_PAIRS, FI_FRAMES, 24, rng)
    write_gwsc("gwsc/fi_subtask1.tsv", fi)
    write("gwsc/fi_subtask1.gold.tsv",
          "\n".join(["change"] + [f"{rng.uniform(-5, 5):.2f}" for _ in fi]) + "\n")

    dev = gwsc_rows(EN_PAIRS, EN_FRAMES, 18, rng)
    write_gwsc("gwsc/en_trial.tsv", dev)
    write("gwsc/en_trial.gold.tsv",
          "\n".join(["change"] + [f"{rng.uniform(-5, 5):.2f}" for _ in dev]) + "\n")


def main():
    lexicon()
    stoplist()
    usim()
    coinco()
    wic()
    opusparcus()
    ppdb()
    corpus()
    legacy()
    gwsc()


if __name__ == "__main__":
    main()
