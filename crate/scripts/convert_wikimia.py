"""Convert WikiMIA (swj0419/WikiMIA on the Hugging Face hub) to JSONL.

    pip install datasets
    python scripts/convert_wikimia.py --length 32 --out data/wikimia.jsonl

label 1 = member (pre-2017 event pages), 0 = nonmember (2023 events).
The length splits describe the same events at different truncations, so
pick one rather than merging them.
"""

import argparse

from datasets import load_dataset

from _jsonl import write_jsonl


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=32, choices=[32, 64, 128, 256])
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    ds = load_dataset("swj0419/WikiMIA", split=f"WikiMIA_length{args.length}")
    rows = (
        (f"wikimia{args.length}-{i:05d}", r["input"], r["label"] == 1, {"length": args.length})
        for i, r in enumerate(ds)
    )
    print(f"wrote {write_jsonl(args.out, rows)} samples to {args.out}")


if __name__ == "__main__":
    main()
