"""Shared writer for the mia-audit JSONL contract."""

import json


def write_jsonl(path, rows):
    """rows: iterable of (id, text, is_member, meta dict). Returns count."""
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for sample_id, text, is_member, meta in rows:
            record = {
                "id": str(sample_id),
                "text": text,
                "label": "member" if is_member else "nonmember",
            }
            if meta:
                record["meta"] = {k: str(v) for k, v in meta.items()}
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n
