#!/usr/bin/env python3
"""Writes the synthetic fixtures: a 20-record compression corpus and a small
eval gold/predictions set.

Each corpus document is a few encyclopedic sentences with a hand-built AMR
graph per sentence. Graph tokens are the linearized PENMAN string split into
byte-level BPE style pieces (word-initial pieces carry the U+0120 marker), and
log-probabilities are drawn from a seeded generator: graph syntax is nearly
certain, generic concepts are likely, and names, dates and rare content
concepts are hard for the parser to predict.
"""

import argparse
import json
import math
import random
from pathlib import Path

G = "Ġ"

# ---- PENMAN construction ------------------------------------------------------


class Node:
    def __init__(self, label, *edges):
        self.label = label
        self.edges = list(edges)  # (role, Node | Ref | str literal | int)
        self.var = None


class Ref:
    def __init__(self, node):
        self.node = node


def name(*parts):
    return Node("name", *[(f":op{i + 1}", p) for i, p in enumerate(parts)])


def named(label, *parts, extra=()):
    return Node(label, (":name", name(*parts)), *extra)


def date(day=None, month=None, year=None):
    edges = []
    if day is not None:
        edges.append((":day", day))
    if month is not None:
        edges.append((":month", month))
    if year is not None:
        edges.append((":year", year))
    return Node("date-entity", *edges)


def assign_vars(root):
    used = {}

    def visit(n):
        if n.var is not None:
            return
        base = n.label[0].lower() if n.label[0].isalpha() else "x"
        used[base] = used.get(base, 0) + 1
        n.var = base if used[base] == 1 else f"{base}{used[base]}"
        for _, t in n.edges:
            if isinstance(t, Node):
                visit(t)

    visit(root)


def split_label(label):
    """Splits a concept label into BPE-like pieces."""
    pieces = []
    word, _, sense = label.partition("-") if label[-3:-2] == "-" and label[-2:].isdigit() else (label, "", "")
    if len(word) > 7:
        cut = len(word) // 2
        pieces += [word[:cut], word[cut:]]
    else:
        pieces.append(word)
    if sense:
        pieces += ["-", sense]
    return pieces


HIGH = {"name", "date-entity"}
GENERIC = {"person", "city", "country", "and", "thing", "river", "sea", "team", "film", "novel", "award",
           "building", "university", "company", "mountain", "band", "album", "ship", "state", "island"}


def concept_logprob(label, rng, rare):
    if label in HIGH:
        p = rng.uniform(0.12, 0.25)
    elif label in GENERIC:
        p = rng.uniform(0.75, 0.97)
    elif label in rare:
        p = rng.uniform(0.15, 0.3)
    else:
        p = rng.uniform(0.35, 0.8)
    return math.log(p)


def linearize(root, rng, rare):
    """PENMAN text and scored tokens for a graph."""
    assign_vars(root)
    text = []
    tokens = []
    seen = set()

    def syntax(piece):
        tokens.append({"text": piece, "logprob": round(math.log(rng.uniform(0.9, 0.999)), 6)})

    def literal(value):
        if isinstance(value, int):
            text.append(str(value))
            tokens.append({"text": G + str(value), "logprob": round(math.log(rng.uniform(0.05, 0.4)), 6)})
        else:
            text.append(json.dumps(value))
            tokens.append({"text": G + '"', "logprob": round(math.log(rng.uniform(0.9, 0.99)), 6)})
            for i, w in enumerate(value.split(" ")):
                tokens.append({"text": (G if i else "") + w, "logprob": round(math.log(rng.uniform(0.1, 0.6)), 6)})
            tokens.append({"text": '"', "logprob": round(math.log(rng.uniform(0.9, 0.99)), 6)})

    def visit(n):
        seen.add(id(n))
        text.append(f"({n.var} / {n.label}")
        syntax(G + "(")
        syntax(G + n.var)
        syntax(G + "/")
        base = concept_logprob(n.label, rng, rare)
        for i, piece in enumerate(split_label(n.label)):
            lp = base if i == 0 else math.log(min(0.999, math.exp(base) * rng.uniform(1.0, 2.5)))
            tokens.append({"text": (G if i == 0 else "") + piece, "logprob": round(lp, 6)})
        for role, target in n.edges:
            text.append(" " + role + " ")
            syntax(G + role)
            if isinstance(target, Ref):
                text.append(target.node.var)
                syntax(G + target.node.var)
            elif isinstance(target, Node):
                if id(target) in seen:
                    text.append(target.var)
                    syntax(G + target.var)
                else:
                    visit(target)
            else:
                literal(target)
        text.append(")")
        syntax(G + ")")

    visit(root)
    return "".join(text), tokens


# ---- facts ----------------------------------------------------------------------
# Each builder returns (sentence, graph, rare content labels).


def born(person, city, day, month, year):
    g = Node("bear-02", (":ARG1", named("person", *person.split())), (":location", named("city", city)),
             (":time", date(day, month, year)))
    months = ["January", "February", "March", "April", "May", "June", "July", "August", "September",
              "October", "November", "December"]
    return f"{person} was born in {city} on {months[month - 1]} {day}, {year}.", g, {"bear-02"}


def occupation(person, nationality, job):
    g = Node(job, (":domain", named("person", *person.split())), (":mod", Node(nationality.lower())))
    return f"{person} was a {nationality} {job}.", g, {job}


def wrote(person, title, year, kind="novel"):
    g = Node("write-01", (":ARG0", named("person", *person.split())), (":ARG1", named(kind, *title.split())),
             (":time", date(year=year)))
    return f"{person} wrote the {kind} {title} in {year}.", g, {"write-01"}


def capital(city, country):
    c = named("city", city)
    g = Node("capital", (":domain", c), (":poss", named("country", *country.split())))
    return f"{city} is the capital of {country}.", g, {"capital"}


def directed(film, person, year):
    f = named("film", *film.split())
    g = Node("and", (":op1", Node("direct-01", (":ARG0", named("person", *person.split())), (":ARG1", f))),
             (":op2", Node("release-01", (":ARG1", Ref(f)), (":time", date(year=year)))))
    return f"{film} was directed by {person} and released in {year}.", g, {"direct-01", "release-01"}


def flows(river, city, sea):
    g = Node("flow-01", (":ARG1", named("river", *river.split())), (":path", named("city", city)),
             (":destination", named("sea", *sea.split())))
    return f"The {river} flows through {city} into the {sea}.", g, {"flow-01"}


def won(person, prize, field, year):
    g = Node("win-01", (":ARG0", named("person", *person.split())), (":ARG1", named("award", *prize.split())),
             (":topic", Node(field.lower())), (":time", date(year=year)))
    return f"{person} won the {prize} in {field} in {year}.", g, {"win-01", field.lower()}


def designed(building, person, city):
    g = Node("design-01", (":ARG0", named("person", *person.split())),
             (":ARG1", named("building", *building.split(), extra=[(":location", named("city", city))])))
    return f"The {building} in {city} was designed by {person}.", g, {"design-01"}


def founded(company, person, city, year):
    g = Node("found-01", (":ARG0", named("person", *person.split())), (":ARG1", named("company", *company.split())),
             (":location", named("city", city)), (":time", date(year=year)))
    return f"{person} founded {company} in {city} in {year}.", g, {"found-01"}


def played(person, team, start, end):
    g = Node("play-01", (":ARG0", named("person", *person.split())), (":ARG2", named("team", *team.split())),
             (":time", Node("date-interval", (":op1", date(year=start)), (":op2", date(year=end)))))
    return f"{person} played for {team} from {start} to {end}.", g, {"play-01", "date-interval"}


def height(mountain, metres, country):
    g = Node("rise-01", (":ARG1", named("mountain", *mountain.split(), extra=[(":location", named("country", country))])),
             (":ARG4", Node("distance-quantity", (":quant", metres), (":unit", Node("metre")))))
    return f"{mountain} in {country} rises to {metres} metres.", g, {"rise-01", "metre"}


def studied(person, subject, university):
    g = Node("study-01", (":ARG0", named("person", *person.split())), (":ARG1", Node(subject.lower())),
             (":location", named("university", *university.split())))
    return f"{person} studied {subject} at the {university}.", g, {"study-01", subject.lower()}


def located(thing, label, place, place_label="city"):
    g = Node("be-located-at-91", (":ARG1", named(label, *thing.split())), (":ARG2", named(place_label, *place.split())))
    return f"{thing} is located in {place}.", g, set()


def released_album(band, album, year):
    g = Node("release-01", (":ARG0", named("band", *band.split())), (":ARG1", named("album", *album.split())),
             (":time", date(year=year)))
    return f"{band} released the album {album} in {year}.", g, {"release-01"}


def launched(ship, day, month, year):
    months = ["January", "February", "March", "April", "May", "June", "July", "August", "September",
              "October", "November", "December"]
    g = Node("launch-01", (":ARG1", named("ship", *ship.split())), (":time", date(day, month, year)))
    return f"The {ship} was launched on {months[month - 1]} {day}, {year}.", g, {"launch-01"}


# ---- records --------------------------------------------------------------------

RECORDS = [
    ("q01", "In what city was Marie Curie born?", ["Warsaw"],
     [[born("Marie Curie", "Warsaw", 7, 11, 1867), occupation("Marie Curie", "Polish", "physicist")],
      [won("Marie Curie", "Nobel Prize", "Physics", 1903), studied("Marie Curie", "Physics", "University of Paris"),
       capital("Warsaw", "Poland")]],
     [[capital("Paris", "France")]]),
    ("q02", "Who wrote The Great Gatsby?", ["F. Scott Fitzgerald", "Fitzgerald"],
     [[wrote("Scott Fitzgerald", "The Great Gatsby", 1925), occupation("Scott Fitzgerald", "American", "novelist")]],
     [[wrote("Ernest Hemingway", "The Sun Also Rises", 1926)]]),
    ("q03", "What is the capital of Kenya?", ["Nairobi"],
     [[capital("Nairobi", "Kenya"), located("Nairobi National Park", "park", "Nairobi")],
      [flows("Nairobi River", "Nairobi", "Indian Ocean"), capital("Nairobi", "Kenya")]],
     []),
    ("q04", "Who directed Spirited Away?", ["Hayao Miyazaki", "Miyazaki"],
     [[directed("Spirited Away", "Hayao Miyazaki", 2001)],
      [directed("Princess Mononoke", "Hayao Miyazaki", 1997), directed("Spirited Away", "Hayao Miyazaki", 2001)],
      [won("Hayao Miyazaki", "Academy Award", "Animation", 2003), directed("Spirited Away", "Hayao Miyazaki", 2001)]],
     [[directed("Akira", "Katsuhiro Otomo", 1988)]]),
    ("q05", "Which river flows through Budapest?", ["Danube"],
     [[flows("Danube", "Budapest", "Black Sea"), capital("Budapest", "Hungary")]],
     [[flows("Vistula", "Warsaw", "Baltic Sea")]]),
    ("q06", "Who designed the Sagrada Familia?", ["Antoni Gaudi", "Gaudi"],
     [[designed("Sagrada Familia", "Antoni Gaudi", "Barcelona"), occupation("Antoni Gaudi", "Catalan", "architect")],
      [designed("Casa Batllo", "Antoni Gaudi", "Barcelona"), designed("Sagrada Familia", "Antoni Gaudi", "Barcelona")]],
     []),
    ("q07", "In what year was Samsung founded?", ["1938"],
     [[founded("Samsung", "Lee Byung-chul", "Daegu", 1938)],
      [founded("Samsung", "Lee Byung-chul", "Daegu", 1938), located("Samsung Electronics", "company", "Suwon")],
      [founded("Samsung", "Lee Byung-chul", "Daegu", 1938), capital("Seoul", "South Korea")]],
     [[founded("Hyundai", "Chung Ju-yung", "Seoul", 1947)]]),
    ("q08", "What team did Johan Cruyff play for?", ["Ajax", "Barcelona"],
     [[played("Johan Cruyff", "Ajax", 1964, 1973), occupation("Johan Cruyff", "Dutch", "footballer")],
      [played("Johan Cruyff", "Barcelona", 1973, 1978)]],
     [[played("Diego Maradona", "Napoli", 1984, 1991)]]),
    ("q09", "How high is Mount Kilimanjaro?", ["5895"],
     [[height("Mount Kilimanjaro", 5895, "Tanzania")]],
     [[height("Mount Kenya", 5199, "Kenya")]]),
    ("q10", "Where did Alan Turing study?", ["University of Cambridge", "Cambridge"],
     [[studied("Alan Turing", "Mathematics", "University of Cambridge"),
       occupation("Alan Turing", "British", "mathematician")],
      [born("Alan Turing", "London", 23, 6, 1912), studied("Alan Turing", "Mathematics", "University of Cambridge")],
      [studied("Alan Turing", "Mathematics", "University of Cambridge")],
      [studied("Alan Turing", "Logic", "University of Cambridge"), won("Alan Turing", "Smith Prize", "Mathematics", 1936)]],
     []),
    ("q11", "When did Radiohead release OK Computer?", ["1997"],
     [[released_album("Radiohead", "OK Computer", 1997)],
      [released_album("Radiohead", "The Bends", 1995), released_album("Radiohead", "OK Computer", 1997)]],
     [[released_album("Blur", "Parklife", 1994)]]),
    ("q12", "When was the Titanic launched?", ["May 31, 1911", "1911"],
     [[launched("Titanic", 31, 5, 1911)],
      [launched("Titanic", 31, 5, 1911), located("Harland and Wolff", "company", "Belfast")]],
     [[launched("Lusitania", 7, 6, 1906)]]),
    ("q13", "What is the capital of Peru?", ["Lima"],
     [[capital("Lima", "Peru")],
      [flows("Rimac River", "Lima", "Pacific Ocean"), capital("Lima", "Peru")],
      [capital("Lima", "Peru"), located("Plaza Mayor", "square", "Lima")]],
     [[capital("Quito", "Ecuador")]]),
    ("q14", "Who won the Nobel Prize in Literature in 1913?", ["Rabindranath Tagore", "Tagore"],
     [[won("Rabindranath Tagore", "Nobel Prize", "Literature", 1913), occupation("Rabindranath Tagore", "Bengali", "poet")]],
     [[won("Romain Rolland", "Nobel Prize", "Literature", 1915)]]),
    ("q15", "Where was Frida Kahlo born?", ["Coyoacan", "Mexico City"],
     [[born("Frida Kahlo", "Coyoacan", 6, 7, 1907), occupation("Frida Kahlo", "Mexican", "painter")],
      [born("Frida Kahlo", "Coyoacan", 6, 7, 1907)]],
     []),
    ("q16", "Who founded Toyota?", ["Kiichiro Toyoda", "Toyoda"],
     [[founded("Toyota", "Kiichiro Toyoda", "Koromo", 1937)],
      [founded("Toyota", "Kiichiro Toyoda", "Koromo", 1937), occupation("Kiichiro Toyoda", "Japanese", "engineer")],
      [founded("Toyota", "Kiichiro Toyoda", "Koromo", 1937)],
      [studied("Kiichiro Toyoda", "Engineering", "University of Tokyo"), founded("Toyota", "Kiichiro Toyoda", "Koromo", 1937)]],
     [[founded("Honda", "Soichiro Honda", "Hamamatsu", 1948)]]),
    ("q17", "Which sea does the Nile flow into?", ["Mediterranean Sea", "Mediterranean"],
     [[flows("Nile", "Cairo", "Mediterranean Sea")]],
     [[flows("Congo River", "Kinshasa", "Atlantic Ocean")], [capital("Cairo", "Egypt")]]),
    ("q18", "What nationality was Jean Sibelius?", ["Finnish"],
     [[occupation("Jean Sibelius", "Finnish", "composer"), born("Jean Sibelius", "Hameenlinna", 8, 12, 1865)],
      [occupation("Jean Sibelius", "Finnish", "composer")]],
     [[occupation("Edvard Grieg", "Norwegian", "composer")]]),
    ("q19", "Who wrote One Hundred Years of Solitude?", ["Gabriel Garcia Marquez", "Garcia Marquez"],
     [[wrote("Gabriel Garcia Marquez", "One Hundred Years of Solitude", 1967)],
      [won("Gabriel Garcia Marquez", "Nobel Prize", "Literature", 1982),
       wrote("Gabriel Garcia Marquez", "One Hundred Years of Solitude", 1967)],
      [wrote("Gabriel Garcia Marquez", "One Hundred Years of Solitude", 1967),
       occupation("Gabriel Garcia Marquez", "Colombian", "novelist")]],
     []),
    ("q20", "In what year did Pele join Santos?", ["1956"],
     [[played("Pele", "Santos", 1956, 1974)],
      [played("Pele", "Santos", 1956, 1974), occupation("Pele", "Brazilian", "footballer")]],
     [[played("Garrincha", "Botafogo", 1953, 1965)]]),
]


def document(facts, hasanswer, rng):
    sentences, graphs = [], []
    for sentence, graph, rare in facts:
        penman, tokens = linearize(graph, rng, rare)
        sentences.append(sentence)
        graphs.append({"penman": penman, "tokens": tokens})
    return {"text": " ".join(sentences), "hasanswer": hasanswer, "graphs": graphs}


def build_corpus(seed):
    rng = random.Random(seed)
    out = []
    for qid, query, answers, positives, negatives in RECORDS:
        docs = [document(f, True, rng) for f in positives] + [document(f, False, rng) for f in negatives]
        rng.shuffle(docs)
        out.append({"schema_version": 1, "query_id": qid, "query": query, "answers": answers, "documents": docs})
    return out


# ---- eval fixture -------------------------------------------------------------
# Six queries with k = 1, 1, 2, 2, 3, 3 after filtering. Hand tally with
# substring matching, in percent:
#   model-a / Vanilla  k1: 1/2 = 50   k2: 2/2 = 100  k3: 1/2 = 50
#   model-a / Ours     k1: 2/2 = 100  k2: 1/2 = 50   k3: 2/2 = 100
#   model-b / Vanilla  k1: 0/2 = 0    k2: 1/2 = 50   k3: 1/2 = 50
#   model-b / Ours     k1: 1/2 = 50   k2: 1/2 = 50   k3: 2/2 = 100

EVAL_GOLD = [
    ("e1", "Capital of Kenya?", ["Nairobi"], [True]),
    ("e2", "Author of Hamlet?", ["William Shakespeare", "Shakespeare"], [True, False]),
    ("e3", "Largest planet?", ["Jupiter"], [True, True]),
    ("e4", "Who painted the Mona Lisa?", ["Leonardo da Vinci"], [False, True, True]),
    ("e5", "Boiling point of water in Celsius?", ["100"], [True, True, True]),
    ("e6", "Currency of Japan?", ["yen"], [True, True, True, False]),
]

EVAL_PREDICTIONS = {
    ("model-a", "Vanilla"): {"e1": "It is Nairobi.", "e2": "Marlowe", "e3": "jupiter", "e4": "Leonardo da Vinci!",
                             "e5": "212 Fahrenheit", "e6": "The Yen."},
    ("model-a", "Ours"): {"e1": "nairobi", "e2": "shakespeare wrote it", "e3": "Saturn", "e4": "leonardo  DA vinci",
                          "e5": "100 degrees", "e6": "yen"},
    ("model-b", "Vanilla"): {"e1": "Mombasa", "e2": "Bacon", "e3": "Jupiter.", "e4": "Raphael", "e5": "100",
                             "e6": "dollar"},
    ("model-b", "Ours"): {"e1": "Kisumu", "e2": "William Shakespeare", "e3": "Mars", "e4": "Leonardo da Vinci",
                          "e5": "about 100", "e6": "Japanese yen"},
}


def build_eval():
    gold = []
    for qid, query, answers, flags in EVAL_GOLD:
        docs = [{"text": f"Passage {i} for {qid}.", "hasanswer": h} for i, h in enumerate(flags)]
        gold.append({"schema_version": 1, "query_id": qid, "query": query, "answers": answers, "documents": docs})
    preds = []
    for (model, method), answers in EVAL_PREDICTIONS.items():
        for qid, text in answers.items():
            preds.append({"query_id": qid, "model_id": model, "method_id": method, "generated": text})
    return gold, preds


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()

    write_jsonl(args.out / "synthetic" / "corpus.jsonl", build_corpus(args.seed))

    gold, preds = build_eval()
    write_jsonl(args.out / "eval" / "gold.jsonl", gold)
    write_jsonl(args.out / "eval" / "predictions.jsonl", preds)
    write_jsonl(args.out / "eval" / "unresolved.jsonl",
                preds + [{"query_id": "e99", "model_id": "model-a", "method_id": "Ours", "generated": "x"}])
    with open(args.out / "eval" / "config.json", "w") as f:
        json.dump({"k_max": 3, "interval_standard": [1, 3], "interval_long": [2, 3]}, f, indent=2)
        f.write("\n")

    bad = build_corpus(args.seed)[:3]
    bad[1]["documents"][0]["graphs"][0]["tokens"][0]["logprob"] = 0.5
    lines = [json.dumps(r, ensure_ascii=False) for r in bad]
    lines.insert(2, '{"query_id": "broken", "query": ')
    (args.out / "invalid").mkdir(parents=True, exist_ok=True)
    with open(args.out / "invalid" / "bad_schema.jsonl", "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
