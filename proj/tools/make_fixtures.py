#!/usr/bin/env python3
"""Regenerates the synthetic fixture corpus under data/fixtures.

Every file is a pure function of the seed below, so rerunning the script
reproduces the committed bytes.
"""
import argparse
import pathlib
import random

FILLER = (
    "the a this that day night game team phone song city rain coffee "
    "weekend work music movie book street school friend bus train "
    "morning news show party dinner lunch market park river beach "
    "really just very quite maybe always never today tomorrow again"
).split()
VERBS = "love watch see like hate miss want need make read hear call".split()


def sentence(rng, marker=None, n=None):
    n = n or rng.randint(4, 8)
    words = [rng.choice(FILLER + VERBS) for _ in range(n)]
    if rng.random() < 0.5:
        words.insert(0, "@USER")
    if marker:
        words.insert(rng.randint(0, len(words)), marker)
    return " ".join(words)


def write(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def soft_a(rng, n=200):
    rows = ["id\ttext\taverage\tstd"]
    for i in range(n):
        off = i % 4 == 0
        mean = rng.uniform(0.55, 0.95) if off else rng.uniform(0.05, 0.45)
        rows.append(f"a{i:04d}\t{sentence(rng, 'zork' if off else None)}\t{mean:.3f}\t{rng.uniform(0.05, 0.3):.3f}")
    return rows


def soft_b(rng, n=200):
    rows = ["id\ttext\taverage\tstd"]
    for i in range(n):
        unt = i % 5 == 0
        mean = rng.uniform(0.5, 0.9) if unt else rng.uniform(0.05, 0.45)
        rows.append(f"b{i:04d}\t{sentence(rng, 'meh' if unt else 'zork')}\t{mean:.3f}\t{rng.uniform(0.05, 0.3):.3f}")
    return rows


def soft_c(rng, n=200):
    rows = ["id\ttext\taverage_ind\taverage_grp\taverage_oth"]
    markers = ["youmark", "groupmark", "othermark"]
    for i in range(n):
        # roughly 70% IND, 20% GRP, 10% OTH
        r = i % 10
        k = 0 if r < 7 else (1 if r < 9 else 2)
        top = rng.uniform(0.55, 0.9)
        rest = 1.0 - top
        split = rng.uniform(0.2, 0.8)
        p = [0.0, 0.0, 0.0]
        p[k] = top
        others = [j for j in range(3) if j != k]
        p[others[0]] = rest * split
        p[others[1]] = rest - p[others[0]]
        cells = [f"{x:.4f}" for x in p]
        rows.append(f"c{i:04d}\t{sentence(rng, markers[k])}\t" + "\t".join(cells))
    return rows


def olid(rng, n=200, prefix="o"):
    rows = ["id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c"]
    for i in range(n):
        off = i % 3 == 0
        if not off:
            rows.append(f"{prefix}{i:04d}\t{sentence(rng)}\tNOT\tNULL\tNULL")
            continue
        unt = i % 9 == 0
        b = "UNT" if unt else "TIN"
        c = "NULL" if unt else ["IND", "GRP", "OTH"][i % 4 % 3]
        rows.append(f"{prefix}{i:04d}\t{sentence(rng, 'zork')}\tOFF\t{b}\t{c}")
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"))
    ap.add_argument("--seed", type=int, default=20200901)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    write(out / "soft_a.tsv", soft_a(rng))
    write(out / "soft_b.tsv", soft_b(rng))
    write(out / "soft_c.tsv", soft_c(rng))
    write(out / "soft_a_out_of_range.tsv", [
        "id\ttext\taverage\tstd",
        "r1\tfine words here\t0.20\t0.10",
        "r2\tzork more words\t1.2\t0.10",
        "r3\tother words\t0.30\t0.05",
    ])

    write(out / "olid_train.tsv", olid(rng))
    test = ["id\ttweet"]
    gold = []
    for i in range(40):
        off = i % 3 == 0
        test.append(f"t{i:04d}\t{sentence(rng, 'zork' if off else None)}")
        gold.append(f"t{i:04d},{'OFF' if off else 'NOT'}")
    write(out / "olid_test_a.tsv", test)
    write(out / "gold_a.csv", gold)
    write(out / "gold_a_missing.csv", gold[:-1])

    # four-record evaluation example: macro F1 0.733333, accuracy 0.75
    write(out / "hand_test.tsv", [
        "id\ttweet",
        "h1\tzork you @USER",
        "h2\tthat zork game again",
        "h3\tnice day today",
        "h4\tsee you at lunch",
    ])
    write(out / "hand_gold.csv", ["h1,OFF", "h2,OFF", "h3,NOT", "h4,NOT"])
    write(out / "hand_predictions.csv", ["h1,OFF", "h2,NOT", "h3,NOT", "h4,NOT"])

    # Danish-tagged base with 87 NOT and 13 OFF, and a ten-record English source with 3 OFF
    base = ["id\ttweet\tsubtask_a"]
    for i in range(100):
        off = i % 8 == 0
        base.append(f"d{i:04d}\t{sentence(rng, 'zork' if off else None)}\t{'OFF' if off else 'NOT'}")
    write(out / "da_train.tsv", base)
    source = ["id\ttweet\tsubtask_a"]
    for i in range(10):
        off = i in (1, 4, 7)
        source.append(f"s{i:04d}\t{sentence(rng, 'zork' if off else None)}\t{'OFF' if off else 'NOT'}")
    write(out / "en_source.tsv", source)

    write(out / "svm.json", ['{"kind": "linear_svm", "class_weighting": "balanced", "split": 0.8}'])
    write(out / "soft_lstm.json", [
        '{"embedding_dim": 16, "hidden_dim": 16, "max_epochs": 3, "batch_size": 16, "learning_rate": 0.01}'
    ])
    write(out / "soft_lstm_zero_epochs.json", ['{"embedding_dim": 8, "hidden_dim": 8, "max_epochs": 0}'])
    write(out / "finetune_tiny.json", [
        '{"encoder": {"source": "random_init", "num_layers": 2, "hidden_dim": 16, "num_heads": 2, '
        '"vocab_size": 200, "max_positions": 32},',
        ' "head": {"kind": "linear"},',
        ' "finetune": {"learning_rate": 0.001, "max_epochs": 2, "batch_size": 16, "max_sequence_length": 24}}',
    ])
    write(out / "finetune_missing_registry.json", [
        '{"encoder": {"source": "pretrained_registry", "identifier": "no-such-encoder"},',
        ' "head": {"kind": "linear"}, "finetune": {"max_epochs": 1}}',
    ])


if __name__ == "__main__":
    main()
