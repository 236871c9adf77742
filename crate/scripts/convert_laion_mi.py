"""Convert LAION-MI captions to JSONL (text side only).

    pip install datasets
    python scripts/convert_laion_mi.py --repo antoniaaa/laion_mi --out data/laion_mi.jsonl

Column and split names differ between releases; check the dataset card and
pass --caption-column / --member-split / --nonmember-split accordingly.
Captions are written verbatim: the audit depends on characters such as
`|`, U+00A0 and U+2026 surviving unchanged.
"""

import argparse

from datasets import load_dataset

from _jsonl import write_jsonl


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repo", default="antoniaaa/laion_mi")
    ap.add_argument("--caption-column", default="caption")
    ap.add_argument("--member-split", default="members")
    ap.add_argument("--nonmember-split", default="nonmembers")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    def rows():
        for split, is_member in ((args.member_split, True), (args.nonmember_split, False)):
            for i, r in enumerate(load_dataset(args.repo, split=split)):
                caption = r[args.caption_column]
                if caption:
                    yield f"{split}-{i:06d}", caption, is_member, None

    print(f"wrote {write_jsonl(args.out, rows())} samples to {args.out}")


if __name__ == "__main__":
    main()
