"""Convert BookMIA (swj0419/BookMIA on the Hugging Face hub) to JSONL.

    pip install datasets
    python scripts/convert_bookmia.py --out data/bookmia.jsonl [--authors authors.csv]

label 1 = member. Each row is a snippet; `meta.book` holds the title. The hub
rows carry no author, so for the author-disjoint recipe supply a CSV with
columns `book,author`; without it use `--group-key book` for a book-disjoint
split instead.
"""

import argparse
import csv

from datasets import load_dataset

from _jsonl import write_jsonl


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--authors", help="CSV with columns book,author")
    args = ap.parse_args()

    authors = {}
    if args.authors:
        with open(args.authors, newline="", encoding="utf-8") as f:
            authors = {row["book"]: row["author"] for row in csv.DictReader(f)}

    ds = load_dataset("swj0419/BookMIA", split="train")

    def rows():
        for r in ds:
            meta = {"book": r["book"], "book_id": r["book_id"]}
            if r["book"] in authors:
                meta["author"] = authors[r["book"]]
            yield f"{r['book_id']}-{r['snippet_id']}", r["snippet"], r["label"] == 1, meta

    print(f"wrote {write_jsonl(args.out, rows())} samples to {args.out}")


if __name__ == "__main__":
    main()
