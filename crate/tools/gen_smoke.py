#!/usr/bin/env python3
"""Generate the offline smoke subsets in bAbI line format.

The generator simulates each story's world state directly, so the gold
answers it writes are independent of the Rust pipeline. Output is fully
determined by the seed.

    python3 tools/gen_smoke.py [--seed 7] [--out crates/core/data/smoke]
"""

import argparse
import random
from pathlib import Path

import gen_dialog

MEN = ["John", "Daniel", "Fred", "Bill", "Jeff"]
WOMEN = ["Mary", "Sandra", "Julie"]
PLACES = ["bathroom", "hallway", "garden", "office", "bedroom", "kitchen"]
PLACES10 = ["kitchen", "park", "cinema", "school", "office", "bedroom"]
OBJECTS = ["football", "apple", "milk"]
MOVE = ["moved to", "went to", "went back to", "journeyed to", "travelled to"]
GET = ["picked up", "got", "grabbed", "took"]
DROP = ["dropped", "discarded", "put down", "left"]
GIVE = ["gave", "passed", "handed"]
NUMBERS = ["none", "one", "two", "three", "four", "five"]
LINKERS = ["Then", "After that", "Afterwards", "Following that"]


class World:
    def __init__(self):
        self.loc = {}
        self.holder = {}
        self.obj_loc = {}
        self.order = []  # (person, object) in acquisition order

    def move(self, p, place):
        self.loc[p] = place

    def take(self, p, o):
        self.holder[o] = p
        self.order = [x for x in self.order if x[1] != o] + [(p, o)]

    def drop(self, p, o):
        del self.holder[o]
        self.obj_loc[o] = self.loc.get(p)
        self.order = [x for x in self.order if x[1] != o]

    def give(self, p, o, q):
        self.holder[o] = q
        self.order = [x for x in self.order if x[1] != o] + [(q, o)]

    def carrying(self, p):
        return [o for (q, o) in self.order if q == p]

    def where_obj(self, o):
        if o in self.holder:
            return self.loc.get(self.holder[o])
        return self.obj_loc.get(o)


def event(rng, w, people, allow_give=False):
    """One random story event and its sentence."""
    for _ in range(50):
        kind = rng.choice(["move", "move", "get", "drop", "give"] if allow_give else ["move", "move", "get", "drop"])
        p = rng.choice(people)
        if kind == "move":
            place = rng.choice([x for x in PLACES if x != w.loc.get(p)])
            w.move(p, place)
            return f"{p} {rng.choice(MOVE)} the {place}."
        if kind == "get" and p in w.loc:
            free = [o for o in OBJECTS if o not in w.holder and w.obj_loc.get(o) in (None, w.loc[p])]
            if free:
                o = rng.choice(free)
                w.take(p, o)
                return f"{p} {rng.choice(GET)} the {o} there."
        if kind == "drop":
            mine = w.carrying(p)
            if mine and p in w.loc:
                o = rng.choice(mine)
                w.drop(p, o)
                return f"{p} {rng.choice(DROP)} the {o}."
        if kind == "give":
            mine = w.carrying(p)
            others = [q for q in people if q != p and w.loc.get(q) == w.loc.get(p) and p in w.loc]
            if mine and others:
                o, q = rng.choice(mine), rng.choice(others)
                w.give(p, o, q)
                return f"{p} {rng.choice(GIVE)} the {o} to {q}."
    p = rng.choice(people)
    place = rng.choice([x for x in PLACES if x != w.loc.get(p)])
    w.move(p, place)
    return f"{p} {rng.choice(MOVE)} the {place}."


def write_story(lines):
    return "".join(f"{i} {text}\n" for i, text in enumerate(lines, 1))


def story_with_questions(rng, steps, ask):
    """`steps` yields sentences; `ask()` returns (question, answer) or None."""
    lines = []
    support = []
    for s in steps:
        lines.append(s)
        support.append(len(lines))
        qa = ask()
        if qa:
            q, a = qa
            lines.append(f"{q}\t{a}\t{support[-1]}")
    return write_story(lines)


def task1(rng, coref=False):
    people = ["Mary", "John", "Daniel", "Sandra"]
    w = World()
    lines, n_q, prev = [], 0, None
    while n_q < 5:
        for _ in range(2):
            p = rng.choice(people)
            place = rng.choice([x for x in PLACES if x != w.loc.get(p)])
            w.move(p, place)
            if coref and prev == p and rng.random() < 0.7:
                pron = "she" if p in WOMEN else "he"
                lines.append(f"{rng.choice(LINKERS)} {pron} {rng.choice(MOVE)} the {place}.")
            else:
                lines.append(f"{p} {rng.choice(MOVE)} the {place}.")
            prev = p
        p = rng.choice(list(w.loc))
        lines.append(f"Where is {p}?\t{w.loc[p]}\t{len(lines)}")
        n_q += 1
    return write_story(lines)


def task_objects(rng, question):
    people = ["Mary", "John", "Daniel", "Sandra"]
    w = World()
    for p in people:
        w.move(p, rng.choice(PLACES))
    lines = [f"{p} {rng.choice(MOVE)} the {w.loc[p]}." for p in rng.sample(people, 2)]
    for p in people:
        if not any(line.startswith(p) for line in lines):
            del w.loc[p]
    n_q = 0
    while n_q < 5:
        for _ in range(rng.randint(1, 3)):
            lines.append(event(rng, w, people))
        qa = question(rng, w, people)
        if qa:
            lines.append(f"{qa[0]}\t{qa[1]}\t{len(lines)}")
            n_q += 1
    return write_story(lines)


def q_where_object(rng, w, people):
    known = [o for o in OBJECTS if w.where_obj(o)]
    if not known:
        return None
    o = rng.choice(known)
    return f"Where is the {o}?", w.where_obj(o)


def q_count(rng, w, people):
    p = rng.choice(people)
    return f"How many objects is {p} carrying?", NUMBERS[len(w.carrying(p))]


def q_list(rng, w, people):
    p = rng.choice(people)
    items = w.carrying(p)
    return f"What is {p} carrying?", ",".join(items) if items else "nothing"


def task5(rng):
    people = ["Fred", "Bill", "Mary", "Jeff"]
    w = World()
    for p in people:
        w.move(p, "kitchen")
    lines, gives, n_q = [], [], 0
    while n_q < 5:
        for _ in range(rng.randint(1, 3)):
            p = rng.choice(people)
            mine = w.carrying(p)
            free = [o for o in OBJECTS if o not in w.holder]
            if mine and rng.random() < 0.7:
                o = rng.choice(mine)
                q = rng.choice([x for x in people if x != p])
                w.give(p, o, q)
                gives.append((p, o, q))
                lines.append(f"{p} {rng.choice(GIVE)} the {o} to {q}.")
            elif free:
                o = rng.choice(free)
                w.take(p, o)
                lines.append(f"{p} {rng.choice(GET)} the {o} there.")
            else:
                lines.append(f"{p} went back to the kitchen.")
        if not gives:
            continue
        g, o, r = gives[-1]
        form = rng.randrange(5)
        if form == 0:
            latest = [x for x in gives if x[0] == g and x[2] == r][-1]
            q, a = f"What did {g} give to {r}?", latest[1]
        elif form == 1:
            latest = [x for x in gives if x[1] == o and x[2] == r][-1]
            q, a = f"Who gave the {o} to {r}?", latest[0]
        elif form == 2:
            latest = [x for x in gives if x[1] == o][-1]
            q, a = f"Who gave the {o}?", latest[0]
        elif form == 3:
            latest = [x for x in gives if x[1] == o][-1]
            q, a = f"Who received the {o}?", latest[2]
        else:
            latest = [x for x in gives if x[0] == g and x[1] == o][-1]
            q, a = f"Who did {g} give the {o} to?", latest[2]
        lines.append(f"{q}\t{a}\t{len(lines)}")
        n_q += 1
    return write_story(lines)


def task6(rng):
    people = ["Mary", "John", "Daniel", "Sandra"]
    w = World()
    lines, n_q = [], 0
    while n_q < 5:
        for _ in range(2):
            lines.append(event(rng, w, people))
        known = [p for p in people if p in w.loc]
        if not known:
            continue
        p = rng.choice(known)
        place = w.loc[p] if rng.random() < 0.5 else rng.choice(PLACES)
        lines.append(f"Is {p} in the {place}?\t{'yes' if w.loc[p] == place else 'no'}\t{len(lines)}")
        n_q += 1
    return write_story(lines)


def task9(rng):
    people = ["Mary", "John", "Daniel", "Sandra"]
    state = {}
    lines, n_q = [], 0
    while n_q < 5:
        for _ in range(2):
            p = rng.choice(people)
            place = rng.choice(PLACES)
            r = rng.random()
            if r < 0.4:
                state[p] = ("in", place)
                lines.append(f"{p} {rng.choice(MOVE)} the {place}.")
            elif r < 0.6:
                state[p] = ("in", place)
                lines.append(f"{p} is in the {place}.")
            elif r < 0.8:
                state[p] = ("not", place)
                lines.append(f"{p} is not in the {place}.")
            else:
                state[p] = ("not", place)
                lines.append(f"{p} is no longer in the {place}.")
        p = rng.choice(list(state))
        kind, place = state[p]
        if kind == "in":
            asked = place if rng.random() < 0.5 else rng.choice(PLACES)
            answer = "yes" if asked == place else "no"
        else:
            asked, answer = place, "no"
        lines.append(f"Is {p} in the {asked}?\t{answer}\t{len(lines)}")
        n_q += 1
    return write_story(lines)


def task10(rng):
    people = ["Bill", "Fred", "Julie", "Mary"]
    state = {}
    lines, n_q = [], 0
    while n_q < 5:
        for _ in range(2):
            p = rng.choice(people)
            r = rng.random()
            if r < 0.4:
                a, b = rng.sample(PLACES10, 2)
                state[p] = {a, b}
                lines.append(f"{p} is either in the {a} or the {b}.")
            elif r < 0.7:
                a = rng.choice(PLACES10)
                state[p] = {a}
                lines.append(f"{p} is in the {a}.")
            else:
                a = rng.choice(PLACES10)
                state[p] = {a}
                lines.append(f"{p} {rng.choice(MOVE)} the {a}.")
        p = rng.choice(list(state))
        places = state[p]
        asked = rng.choice(sorted(places)) if rng.random() < 0.6 else rng.choice(PLACES10)
        if asked not in places:
            answer = "no"
        else:
            answer = "yes" if len(places) == 1 else "maybe"
        lines.append(f"Is {p} in the {asked}?\t{answer}\t{len(lines)}")
        n_q += 1
    return write_story(lines)


QA_TASKS = {
    1: ("qa1_single-supporting-fact_test.txt", lambda r: task1(r)),
    2: ("qa2_two-supporting-facts_test.txt", lambda r: task_objects(r, q_where_object)),
    5: ("qa5_three-arg-relations_test.txt", task5),
    6: ("qa6_yes-no-questions_test.txt", task6),
    7: ("qa7_counting_test.txt", lambda r: task_objects(r, q_count)),
    8: ("qa8_lists-sets_test.txt", lambda r: task_objects(r, q_list)),
    9: ("qa9_simple-negation_test.txt", task9),
    10: ("qa10_indefinite-knowledge_test.txt", task10),
    11: ("qa11_basic-coreference_test.txt", lambda r: task1(r, coref=True)),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--stories", type=int, default=50)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "crates/core/data/smoke"))
    args = ap.parse_args()
    out = Path(args.out)
    (out / "qa").mkdir(parents=True, exist_ok=True)
    for task, (name, gen) in QA_TASKS.items():
        rng = random.Random(args.seed * 1000 + task)
        text = "".join(gen(rng) for _ in range(args.stories))
        (out / "qa" / name).write_text(text)
    gen_dialog.generate(out / "dialog", args.seed)


if __name__ == "__main__":
    main()
