#!/usr/bin/env python3
"""Regenerates data/corpus/synthetic25 deterministically (no RNG)."""

import json
import pathlib

EN_PEOPLE = [
    ("Alice Carter", "She"), ("Ben Shaw", "He"), ("Clara Diaz", "She"),
    ("Dan Wells", "He"), ("Eva Lund", "She"), ("Frank Moss", "He"),
    ("Grace Kim", "She"), ("Hugo Blanc", "He"), ("Iris Vale", "She"),
    ("Jack Monroe", "He"), ("Kara Holt", "She"), ("Liam Reed", "He"),
    ("Mia Torres", "She"), ("Noah Price", "He"), ("Olga Marsh", "She"),
    ("Paul Greer", "He"), ("Quinn Haley", "She"), ("Rosa Flint", "She"),
    ("Sam Porter", "He"), ("Tess Arden", "She"),
]
EN_ORGS = [
    "Acme Labs", "Borealis Group", "Cedar Works", "Delta Mills", "Ember Media",
    "Fleet Union", "Garnet Press", "Harbor Trust", "Ionia Club", "Juno Motors",
    "Kite Systems", "Lumen Radio", "Maple Foundry", "North Rail", "Opal Tea",
    "Pine Institute", "Quartz Bank", "River College", "Solar Guild", "Tidal Farm",
]
EN_LOCS = [
    "Springfield", "Lakeville", "Oak Ridge", "Hillsboro", "Fairview",
    "Ashland", "Brookfield", "Clayton", "Dover", "Elkton",
    "Franklin", "Georgetown", "Hudson", "Ironwood", "Jasper",
    "Kingsport", "Linden", "Madison", "Newport", "Ottawa",
]
EN_TIMES = [
    "January 4th", "February 11th", "March 7th", "April 19th", "May 2nd",
    "June 23rd", "July 14th", "August 30th", "September 9th", "October 17th",
    "November 5th", "December 21st", "1998", "2003", "2011",
    "2015", "2019", "2021", "the spring of 2005", "the fall of 2010",
]
ZH_PEOPLE = [("张伟", "他"), ("王芳", "她"), ("李强", "他"), ("刘敏", "她"), ("陈杰", "他")]
ZH_ORGS = ["东方学院", "南山书店", "北星电台", "西湖银行", "中原车队"]
ZH_LOCS = ["北京", "上海", "广州", "成都", "杭州"]
ZH_TIMES = ["一九九八年", "二零零三年", "五月二日", "十月十七日", "二零二一年"]


def en_doc(i: int) -> dict:
    per, pron = EN_PEOPLE[i]
    org, loc, time = EN_ORGS[i], EN_LOCS[i], EN_TIMES[i]
    doc_id = f"syn-{i + 1:03d}"
    text = f"{per} joined {org} on {time} . {pron} lives in {loc} ."
    entities = [
        {"surface": per, "type": "PER"},
        {"surface": pron, "type": "PER"},
        {"surface": org, "type": "ORG"},
        {"surface": time, "type": "TIME"},
        {"surface": loc, "type": "LOC"},
    ]
    chains = [
        {"id": 0, "mentions": [per, pron], "type": "PER"},
        {"id": 1, "mentions": [org], "type": "ORG"},
        {"id": 2, "mentions": [time], "type": "TIME"},
        {"id": 3, "mentions": [loc], "type": "LOC"},
    ]
    relations = [
        {"type": "work for", "subject": 0, "object": 1},
        {"type": "located in", "subject": 0, "object": 3},
    ]
    image_refs = []
    regions = []
    if i % 2 == 0:
        image_refs.append(f"{doc_id}_1.jpg")
        regions.append({"image": image_refs[0], "type": "PER",
                        "cx": 0.25 + 0.02 * (i % 5), "cy": 0.4, "w": 0.2, "h": 0.3})
    if i % 4 == 0:
        image_refs.append(f"{doc_id}_2.jpg")
        regions.append({"image": image_refs[1], "type": "ORG",
                        "cx": 0.6, "cy": 0.55, "w": 0.35, "h": 0.25 + 0.01 * (i % 4)})
    if i % 7 == 3:
        # a third mention keeps longer coreference chains represented
        alias = per.split()[0]
        text += f" Colleagues praise {alias} ."
        entities.append({"surface": alias, "type": "PER"})
        chains[0]["mentions"].append(alias)
    if i % 5 == 4:
        relations.pop()  # a few docs carry a single relation
    return {
        "id": doc_id, "text": text, "language": "en", "image_refs": image_refs,
        "gold": {"entities": entities, "chains": chains,
                 "relations": relations, "regions": regions},
    }


def zh_doc(i: int) -> dict:
    per, pron = ZH_PEOPLE[i]
    org, loc, time = ZH_ORGS[i], ZH_LOCS[i], ZH_TIMES[i]
    doc_id = f"syn-{21 + i:03d}"
    text = f"{per}于{time}加入{org} 。{pron}住在{loc} 。"
    entities = [
        {"surface": per, "type": "PER"},
        {"surface": pron, "type": "PER"},
        {"surface": org, "type": "ORG"},
        {"surface": time, "type": "TIME"},
        {"surface": loc, "type": "LOC"},
    ]
    chains = [
        {"id": 0, "mentions": [per, pron], "type": "PER"},
        {"id": 1, "mentions": [org], "type": "ORG"},
        {"id": 2, "mentions": [time], "type": "TIME"},
        {"id": 3, "mentions": [loc], "type": "LOC"},
    ]
    relations = [
        {"type": "work for", "subject": 0, "object": 1},
        {"type": "located in", "subject": 1, "object": 3},
    ]
    image_refs = [f"{doc_id}_1.jpg"]
    regions = [{"image": image_refs[0], "type": "PER",
                "cx": 0.45, "cy": 0.35 + 0.05 * i, "w": 0.3, "h": 0.4}]
    return {
        "id": doc_id, "text": text, "language": "zh", "image_refs": image_refs,
        "gold": {"entities": entities, "chains": chains,
                 "relations": relations, "regions": regions},
    }


def main() -> None:
    out_dir = pathlib.Path(__file__).resolve().parent.parent / "data" / "corpus" / "synthetic25"
    out_dir.mkdir(parents=True, exist_ok=True)
    docs = [en_doc(i) for i in range(20)] + [zh_doc(i) for i in range(5)]
    with open(out_dir / "corpus.jsonl", "w", encoding="utf-8") as f:
        for doc in docs:
            f.write(json.dumps(doc, ensure_ascii=False) + "\n")
    schema_src = pathlib.Path(__file__).resolve().parent.parent / "data" / "schema" / "default_schema.json"
    (out_dir / "schema.json").write_text(schema_src.read_text(encoding="utf-8"), encoding="utf-8")
    print(f"wrote {len(docs)} documents to {out_dir}")


if __name__ == "__main__":
    main()
