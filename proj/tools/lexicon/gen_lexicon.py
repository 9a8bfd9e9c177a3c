#!/usr/bin/env python3
"""Regenerate core/data/lexicon.tsv.

Inputs are the unpacked `lemminflect` wheel (inflection table, MIT) and the
`wordfreq` English frequency list, used only to pick the most frequent words.

    pip download --no-deps lemminflect wordfreq
    python3 gen_lexicon.py --lemminflect <dir> --wordfreq <dir> --size 5000 > lexicon.tsv

Output columns: word, comma-separated tags (first = preferred), lemma for
inflected verb/noun forms (empty when the word is its own base form).
"""
import argparse
import gzip
import sys

import msgpack

NUMBERS = """zero one two three four five six seven eight nine ten eleven twelve
thirteen fourteen fifteen sixteen seventeen eighteen nineteen twenty thirty forty
fifty sixty seventy eighty ninety hundred thousand million billion trillion
dozen""".split()

# Closed-class words; tagged `other` so article and gerund rules never fire.
FUNCTION = """a an the this that these those my your his her its our their
i you he she it we they me him us them myself yourself himself herself itself
ourselves themselves who whom whose which what whatever whoever where when why how
and or but nor so yet if then than because although though while whereas unless
until since as of in on at by for with from to into onto upon about above below
over under between among through during before after against without within
along across behind beyond around near toward towards off out up down per via
be is am are was were been being can could will would shall should may might must
do does did done doing not no yes all any some each every either neither both few
many much more most less least other another such own same only just also very
too quite rather there here whether else ever never always often sometimes""".split()

# Words whose dominant reading is verbal although a noun entry also exists.
VERB_FIRST = """make take go get give come see know think look want use find tell
ask work seem feel try leave call keep let begin help talk turn start show hear
play run move like live believe hold bring happen write provide sit stand lose pay
meet include continue set learn change lead understand watch follow stop create
speak read allow add spend grow open walk win offer remember love consider appear
buy wait serve die send expect build stay fall cut reach kill remain suggest raise
pass sell require report decide pull eat drink sleep cook swim fly drive ride climb
sing dance jump throw catch kick fight hunt fish wash clean paint draw teach study
travel visit shop marry cry laugh smile breathe bite chew swallow kiss hug push
carry lift drop hit shoot burn melt freeze boil bake fry pour mix stir wear dress
relax rest dream hope wish fear hate enjoy prefer choose decide fix break repair
borrow lend steal hide seek search explore discover invent answer reply shout
whisper listen smell taste touch sense notice forget forgive apologize promise
agree argue complain celebrate compete practice exercise train prepare plan
organize clean close hurry rush escape save spend earn owe waste""".split()


def load_rank(wordfreq_dir, limit):
    path = f"{wordfreq_dir}/wordfreq/data/large_en.msgpack.gz"
    buckets = msgpack.unpackb(gzip.open(path).read(), raw=False)
    ranked = []
    for bucket in buckets[1:]:
        ranked.extend(bucket)
    return ranked[:limit]


def load_infl(lemminflect_dir):
    path = f"{lemminflect_dir}/lemminflect/resources/infl_lu.csv.gz"
    base = {}       # lemma -> set of tags
    inflected = {}  # form -> (tag, lemma)
    for line in gzip.open(path, "rt"):
        parts = line.rstrip("\n").split(",")
        lemma, pos, forms = parts[0], parts[1], parts[2:]
        if not lemma.isalpha() or not lemma.islower():
            continue
        tag = {"noun": "noun", "verb": "verb", "adj": "adjective", "adv": "other"}[pos]
        base.setdefault(lemma, set()).add(tag)
        if tag in ("noun", "verb"):
            for field in forms:
                for form in field.split("/"):
                    if form and form != lemma and form.isalpha():
                        inflected.setdefault(form, (tag, lemma))
    # Comparative-bearing adjectives lead with the adjective reading.
    graded = set()
    for line in gzip.open(path, "rt"):
        parts = line.rstrip("\n").split(",")
        if parts[1] == "adj" and len(parts) > 2 and parts[2]:
            graded.add(parts[0])
    return base, inflected, graded


def order(word, tags, graded):
    rank = {"number": 0, "noun": 2, "adjective": 3, "verb": 4, "other": 5}
    if word in VERB_FIRST:
        rank["verb"] = 1
    if word in graded:
        rank["adjective"] = 1.5
    return sorted(tags, key=lambda t: rank[t])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lemminflect", required=True)
    ap.add_argument("--wordfreq", required=True)
    ap.add_argument("--size", type=int, default=5000)
    args = ap.parse_args()

    base, inflected, graded = load_infl(args.lemminflect)
    rows = {}
    for w in NUMBERS:
        rows[w] = (["number"], "")
    for w in FUNCTION:
        rows.setdefault(w, (["other"], ""))
    for w in VERB_FIRST:
        if w in base and w not in rows:
            rows[w] = (order(w, base[w], graded), "")

    for w in load_rank(args.wordfreq, 200000):
        if len(rows) >= args.size:
            break
        if w in rows or not w.isalpha() or not w.isascii() or len(w) < 2:
            continue
        tags, lemma = set(), ""
        if w in base:
            tags |= base[w]
        if w in inflected:
            tag, lem = inflected[w]
            tags.add(tag)
            if w not in base:
                lemma = lem
        if not tags:
            continue
        rows[w] = (order(w, tags, graded), lemma)

    out = sys.stdout
    out.write("# word\ttags\tlemma\n")
    for w in sorted(rows):
        tags, lemma = rows[w]
        out.write(f"{w}\t{','.join(tags)}\t{lemma}\n")


if __name__ == "__main__":
    main()
