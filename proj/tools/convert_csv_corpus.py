#!/usr/bin/env python3
"""Convert headerless class,title,description CSV files into text,label CSV.

The label column keeps the original class token; text is title and
description joined by one space.
"""
import argparse
import csv
import sys


def convert(src, dst, label_map):
    reader = csv.reader(src)
    writer = csv.writer(dst, lineterminator="\n")
    writer.writerow(["text", "label"])
    n = 0
    for lineno, row in enumerate(reader, 1):
        if not row:
            continue
        if len(row) < 2:
            raise ValueError(f"line {lineno}: expected class,title[,description]")
        label = label_map.get(row[0], row[0])
        text = " ".join(part.strip() for part in row[1:] if part.strip())
        text = text.replace("\\n", " ")
        writer.writerow([text, label])
        n += 1
    return n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--labels", help="comma separated names for class ids 1..N")
    args = ap.parse_args()
    label_map = {}
    if args.labels:
        label_map = {str(i + 1): name for i, name in enumerate(args.labels.split(","))}
    with open(args.input, newline="", encoding="utf-8") as src, open(args.output, "w", newline="", encoding="utf-8") as dst:
        n = convert(src, dst, label_map)
    print(f"{n} rows written to {args.output}", file=sys.stderr)


if __name__ == "__main__":
    main()
