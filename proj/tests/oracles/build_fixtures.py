"""Regenerates the example store, the oracle corpus and the shared vectors.

    python3 tests/oracles/build_fixtures.py

Outputs are committed; rerunning must leave them unchanged.
"""

import json
import os
import random

from layout_oracle import (TEMPLATE, box, graph, interpret, rect, render_point, render_rect,
                           rounded)

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))

DOG_CAR_COT = "\n".join([
    "Q: Which operation is being performed? A: Move.",
    "Q: Which objects are being moved? A: Dog.",
    "Q:Which objects are not being moved? A: Car, A street",
    "Q: Where are they being moved to? A: Onto the car.",
    "Q: Does the size need to change? A: No. Is an objects apperance changing? No.",
])

DOG_CAR_EXAMPLE = {
    "type": "text",
    "instruction": "Move the dog onto the car.",
    "chain_of_thought": DOG_CAR_COT,
    "input_scene_graph": graph("A dog standing by a car.", [
        box(0, "dog", rect(0.75, 0.8, 0.2, 0.2)),
        box(1, "car", rect(0.1, 0.65, 0.6, 0.35)),
    ]),
    "output_scene_graph": graph("A dog standing on a car. ", [
        box(1, "car", rect(0.1, 0.65, 0.6, 0.35)),
        box(0, "dog", rect(0.35, 0.45, 0.2, 0.2)),
    ]),
}

KITCHEN = graph("A kitchen table with a cup, a plate and a lamp.", [
    box(0, "table", rect(0.1, 0.5, 0.8, 0.4)),
    box(1, "cup", rect(0.2, 0.4, 0.1, 0.1)),
    box(2, "plate", rect(0.45, 0.42, 0.2, 0.08)),
    box(3, "lamp", rect(0.75, 0.1, 0.15, 0.4)),
])

PARK = graph("A park with a tree, a bench and a ball.", [
    box(0, "tree", rect(0.05, 0.1, 0.3, 0.6)),
    box(2, "bench", rect(0.45, 0.6, 0.35, 0.2)),
    box(5, "ball", rect(0.8, 0.85, 0.08, 0.08)),
])

STREET = graph("A street with a red car and a cyclist.", [
    box(0, "car", rect(0.05, 0.55, 0.5, 0.3)),
    box(1, "cyclist", rect(0.65, 0.45, 0.15, 0.35)),
    box(2, "traffic light", rect(0.9, 0.1, 0.06, 0.3)),
])

LIVING = graph("A living room with a sofa and a cat.", [
    box(0, "sofa", rect(0.1, 0.5, 0.6, 0.35)),
    box(1, "cat", rect(0.75, 0.7, 0.15, 0.15)),
    box(2, "window", rect(0.3, 0.05, 0.4, 0.3)),
])

BEACH = graph("A beach with an umbrella and a towel.", [
    box(0, "umbrella", rect(0.2, 0.2, 0.3, 0.45)),
    box(1, "towel", rect(0.5, 0.7, 0.3, 0.1)),
])

DOG_CAR = DOG_CAR_EXAMPLE["input_scene_graph"]

EMPTY = graph("An empty room.", [])


def cot(op, moved, still, dest, size, look):
    return TEMPLATE.format(op=op, moved=moved, still=still, dest=dest, size=size, look=look)


def hand_example(kind, instruction, thought, before, after):
    return {
        "type": kind,
        "instruction": instruction,
        "chain_of_thought": thought,
        "input_scene_graph": before,
        "output_scene_graph": rounded(after),
    }


def oracle_example(kind, before, text):
    after, thought, _ = interpret(before, text)
    return {
        "type": kind,
        "instruction": text,
        "chain_of_thought": thought,
        "input_scene_graph": before,
        "output_scene_graph": rounded(after),
    }


def R(g, uid):
    for b in g["boxes"]:
        if b["unique_id"] == uid:
            return render_rect(b["box"])
    raise KeyError(uid)


def text_examples():
    out = []
    # delete
    out.append(hand_example(
        "text", "Remove the lamp from the table.",
        cot("Delete", "None", "Table, Cup, Plate", "Nowhere", "No", "No"),
        KITCHEN,
        graph("A kitchen table with a cup and a plate.", [b for b in KITCHEN["boxes"]
                                                          if b["name"] != "lamp"])))
    # add
    out.append(hand_example(
        "text", "Add a dog sleeping on the sofa.",
        cot("Add", "None", "Sofa, Cat, Window", "Nowhere", "No", "No"),
        LIVING,
        graph("A living room with a cat and a dog sleeping on the sofa.",
              LIVING["boxes"] + [box(3, "dog", rect(0.3, 0.4, 0.15, 0.12))])))
    # appearance
    out.append(hand_example(
        "text", "Make the car blue.",
        cot("Change appearance", "None", "Car, Cyclist, Traffic light", "Nowhere", "No",
            "Yes, car becomes blue car"),
        STREET,
        graph("A street with a blue car and a cyclist.",
              [box(0, "blue car", rect(0.05, 0.55, 0.5, 0.3))] + STREET["boxes"][1:])))
    # resize
    out.append(hand_example(
        "text", "Make the tree taller, reaching almost to the top of the image.",
        cot("Resize", "None", "Tree, Bench, Ball", "Nowhere", "Yes", "No"),
        PARK,
        graph(PARK["prompt"], [box(0, "tree", rect(0.05, 0.02, 0.3, 0.68))] +
              PARK["boxes"][1:])))
    # move
    out.append(hand_example(
        "text", "Move the ball next to the bench, on its left.",
        cot("Move", "Ball", "Tree, Bench", "Next to the bench, on its left", "No", "No"),
        PARK,
        graph(PARK["prompt"], PARK["boxes"][:2] +
              [box(5, "ball", rect(0.36, 0.72, 0.08, 0.08))])))
    return out


def box_examples():
    k, p, s, l, b = KITCHEN, PARK, STREET, LIVING, BEACH
    return [
        oracle_example("text+box", k, "move %s to %s" % (R(k, 1), render_rect(
            rect(0.7, 0.4, 0.1, 0.1)))),
        oracle_example("text+box", s, "delete %s" % R(s, 1)),
        oracle_example("text+box", l, "Remove %s." % R(l, 1)),
        oracle_example("text+box", p, "add a bird at %s" % render_rect(
            rect(0.15, 0.05, 0.08, 0.06))),
        oracle_example("text+box", l, "make %s a tiger" % R(l, 1)),
        oracle_example("text+box", s, "change %s to a bicycle" % R(s, 1)),
        oracle_example("text+box", b, "resize %s to %s" % (R(b, 0), render_rect(
            rect(0.0, 0.0, 0.4, 0.5)))),
        oracle_example("text+box", k, "add a candle at %s and make it a red candle" %
                       render_rect(rect(0.55, 0.3, 0.04, 0.12))),
        oracle_example("text+box", p, "delete %s and add a dog at %s" % (
            R(p, 2), render_rect(rect(0.5, 0.62, 0.2, 0.18)))),
    ]


def point_examples():
    d, k, s, p, b = DOG_CAR, KITCHEN, STREET, PARK, BEACH
    return [
        oracle_example("text+box+point", b, "move %s to %s" % (R(b, 1), render_point(
            (0.3, 0.85)))),
        oracle_example("text+box+point", d, "move %s to %s and make it a golden retriever" % (
            R(d, 0), render_point((0.45, 0.55)))),
        oracle_example("text+box+point", k, "move %s to %s and resize it to %s" % (
            R(k, 2), render_point((0.3, 0.3)), render_rect(rect(0.0, 0.0, 0.3, 0.1)))),
        oracle_example("text+box+point", s, "move %s to %s and move %s to %s" % (
            R(s, 0), render_point((0.6, 0.7)), R(s, 1), render_point((0.15, 0.6)))),
        oracle_example("text+box+point", p, "move %s to %s and delete %s" % (
            R(p, 5), render_point((0.2, 0.9)), R(p, 2))),
    ]


def build_store():
    store = [DOG_CAR_EXAMPLE] + text_examples() + box_examples() + point_examples()
    assert len(store) == 20, len(store)
    return store


def corpus_case(name, g, text):
    out, thought, referenced = interpret(g, text)
    return {
        "name": name,
        "input": g,
        "instruction": text,
        "expected": out,
        "chain_of_thought": thought,
        "referenced": referenced,
    }


def random_scene(rng, n):
    names = ["dog", "cat", "car", "tree", "lamp", "chair", "boat", "kite", "vase", "bird"]
    boxes = []
    ids = rng.sample(range(0, 40), n)
    for i in range(n):
        w = rng.randint(5, 30) / 100.0
        h = rng.randint(5, 30) / 100.0
        x = rng.randint(0, int(round((1 - w) * 100))) / 100.0
        y = rng.randint(0, int(round((1 - h) * 100))) / 100.0
        boxes.append(box(ids[i], names[i], rect(x, y, w, h)))
    return graph("A random scene.", boxes)


def build_corpus():
    d, k, s, p, l, b = DOG_CAR, KITCHEN, STREET, PARK, LIVING, BEACH
    cases = [
        corpus_case("golden retriever", d, "move %s to %s and make it a golden retriever" % (
            R(d, 0), render_point((0.45, 0.55)))),
        corpus_case("delete car", d, "delete %s" % R(d, 1)),
        corpus_case("add plate to empty", EMPTY, "add a plate at %s" % render_rect(
            rect(0.4, 0.6, 0.3, 0.2))),
        corpus_case("move clamps right edge", k, "move %s to %s" % (R(k, 3), render_point(
            (0.98, 0.3)))),
        corpus_case("move clamps corner", p, "move %s to %s" % (R(p, 0), render_point(
            (0.0, 0.0)))),
        corpus_case("move to box", s, "move %s to %s" % (R(s, 1), render_rect(
            rect(0.1, 0.1, 0.2, 0.3)))),
        corpus_case("remove punctuation", l, "Remove %s!" % R(l, 2)),
        corpus_case("uppercase verbs", b, "MOVE %s TO %s AND MAKE IT A BEACH BALL" % (
            R(b, 1), render_point((0.5, 0.5)))),
        corpus_case("change to", k, "change %s to a mug" % R(k, 1)),
        corpus_case("make an", s, "make %s an ambulance" % R(s, 0)),
        corpus_case("resize grows", l, "resize %s to %s" % (R(l, 1), render_rect(
            rect(0.0, 0.0, 0.3, 0.3)))),
        corpus_case("resize clamps", b, "resize %s to %s" % (R(b, 1), render_rect(
            rect(0.0, 0.0, 0.9, 0.5)))),
        corpus_case("add gets max plus one", p, "add a kite at %s" % render_rect(
            rect(0.6, 0.05, 0.1, 0.1))),
        corpus_case("add then it", p, "add a kite at %s and make it a red kite" % render_rect(
            rect(0.6, 0.05, 0.1, 0.1))),
        corpus_case("add then move it", l, "add a lamp at %s and move it to %s" % (
            render_rect(rect(0.8, 0.1, 0.1, 0.3)), render_point((0.85, 0.45)))),
        corpus_case("delete then add", p, "delete %s and add a fountain at %s" % (
            R(p, 5), render_rect(rect(0.8, 0.75, 0.15, 0.2)))),
        corpus_case("two moves", s, "move %s to %s and move %s to %s" % (
            R(s, 0), render_point((0.5, 0.3)), R(s, 2), render_point((0.1, 0.1)))),
        corpus_case("move then delete", k, "move %s to %s and delete %s" % (
            R(k, 1), render_point((0.8, 0.45)), R(k, 2))),
        corpus_case("move resize it", k, "move %s to %s and resize it to %s" % (
            R(k, 2), render_point((0.5, 0.3)), render_rect(rect(0.0, 0.0, 0.3, 0.1)))),
        corpus_case("loose reference", d, "move %s to %s" % (render_rect(
            rect(0.7, 0.75, 0.25, 0.2)), render_point((0.2, 0.2)))),
        corpus_case("reference prefers overlap", k, "delete %s" % render_rect(
            rect(0.18, 0.38, 0.14, 0.14))),
        corpus_case("multiword name", s, "make %s a vintage red convertible" % R(s, 0)),
        corpus_case("change multiword source", s, "change %s to a lamp post" % R(s, 2)),
        corpus_case("three clauses", b, "move %s to %s and make it a parasol and delete %s" % (
            R(b, 0), render_point((0.6, 0.3)), R(b, 1))),
        corpus_case("add two", EMPTY, "add a cat at %s and add a dog at %s" % (
            render_rect(rect(0.1, 0.1, 0.2, 0.2)), render_rect(rect(0.6, 0.6, 0.2, 0.2)))),
        corpus_case("delete everything", b, "delete %s and delete %s" % (R(b, 0), R(b, 1))),
        corpus_case("move onto itself", d, "move %s to %s" % (R(d, 1), R(d, 1))),
    ]
    rng = random.Random(7)
    verbs = ["move_point", "move_box", "delete", "make", "resize", "add"]
    for i in range(16):
        g = random_scene(rng, rng.randint(2, 6))
        target = rng.choice(g["boxes"])
        verb = verbs[i % len(verbs)]
        ref = R(g, target["unique_id"])
        if verb == "move_point":
            text = "move %s to %s" % (ref, render_point((rng.randint(0, 100) / 100.0,
                                                         rng.randint(0, 100) / 100.0)))
        elif verb == "move_box":
            text = "move %s to %s" % (ref, render_rect(rect(
                rng.randint(0, 60) / 100.0, rng.randint(0, 60) / 100.0,
                rng.randint(5, 40) / 100.0, rng.randint(5, 40) / 100.0)))
        elif verb == "delete":
            text = "delete %s" % ref
        elif verb == "make":
            text = "make %s a striped %s" % (ref, target["name"])
        elif verb == "resize":
            text = "resize %s to %s" % (ref, render_rect(rect(
                0.0, 0.0, rng.randint(5, 60) / 100.0, rng.randint(5, 60) / 100.0)))
        else:
            text = "add a hat at %s and make it a top hat" % render_rect(rect(
                rng.randint(0, 80) / 100.0, rng.randint(0, 80) / 100.0,
                rng.randint(5, 20) / 100.0, rng.randint(5, 20) / 100.0))
        cases.append(corpus_case("random %d %s" % (i, verb), g, text))
    return cases


def build_vectors():
    return [
        {
            "name": "box star text on 1000x1000 canvas",
            "canvas": {"width": 1000, "height": 1000},
            "units": "pixels",
            "tokens": [
                {"type": "text", "text": "move"},
                {"type": "box", "x": 150, "y": 400, "width": 100, "height": 100},
                {"type": "text", "text": "to"},
                {"type": "point", "x": 144, "y": 132},
                {"type": "text", "text": "and make it a golden retriever"},
            ],
            "text": "move {x: 150, y: 400, width: 100, height: 100} to {x: 144, y: 132} "
                    "and make it a golden retriever",
            "normalized_text": "move {x: 0.15, y: 0.40, width: 0.10, height: 0.10} to "
                               "{x: 0.14, y: 0.13} and make it a golden retriever",
        },
        {
            "name": "spaces already present",
            "canvas": {"width": 1000, "height": 1000},
            "units": "pixels",
            "tokens": [
                {"type": "text", "text": "move "},
                {"type": "box", "x": 150, "y": 400, "width": 100, "height": 100},
                {"type": "text", "text": " to "},
                {"type": "point", "x": 144, "y": 132},
                {"type": "text", "text": " and make it a golden retriever"},
            ],
            "text": "move {x: 150, y: 400, width: 100, height: 100} to {x: 144, y: 132} "
                    "and make it a golden retriever",
            "normalized_text": "move {x: 0.15, y: 0.40, width: 0.10, height: 0.10} to "
                               "{x: 0.14, y: 0.13} and make it a golden retriever",
        },
        {
            "name": "wide canvas",
            "canvas": {"width": 2000, "height": 1000},
            "units": "pixels",
            "tokens": [
                {"type": "text", "text": "delete"},
                {"type": "box", "x": 400, "y": 250, "width": 200, "height": 500},
            ],
            "text": "delete {x: 400, y: 250, width: 200, height: 500}",
            "normalized_text": "delete {x: 0.20, y: 0.25, width: 0.10, height: 0.50}",
        },
        {
            "name": "adjacent geometry",
            "canvas": {"width": 100, "height": 100},
            "units": "pixels",
            "tokens": [
                {"type": "text", "text": "resize"},
                {"type": "box", "x": 10, "y": 10, "width": 20, "height": 20},
                {"type": "box", "x": 0, "y": 0, "width": 50, "height": 50},
            ],
            "text": "resize {x: 10, y: 10, width: 20, height: 20} "
                    "{x: 0, y: 0, width: 50, height: 50}",
            "normalized_text": "resize {x: 0.10, y: 0.10, width: 0.20, height: 0.20} "
                               "{x: 0.00, y: 0.00, width: 0.50, height: 0.50}",
        },
    ]


def write(path, data):
    path = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")


def main():
    write("data/examples/default_store.json", build_store())
    write("tests/data/dog_car_example.json", [DOG_CAR_EXAMPLE])
    write("tests/data/oracle_corpus.json", build_corpus())
    write("data/instruction_vectors.json", build_vectors())


if __name__ == "__main__":
    main()
