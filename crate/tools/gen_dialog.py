"""Generate dialog smoke subsets in the bAbI dialog line format.

Gold bot turns come from a scripted simulation of the reservation flow,
written independently of the Rust agent. The OOV files use cuisines,
locations and restaurants that are absent from the bundled entity table.

    python3 tools/gen_dialog.py [--seed 7] [--out crates/core/data/smoke/dialog]
"""

import argparse
import random
from pathlib import Path

CUISINES = ["british", "cantonese", "french", "indian", "italian", "japanese", "korean", "spanish", "thai", "vietnamese"]
LOCATIONS = ["bombay", "london", "madrid", "paris", "rome"]
OOV_CUISINES = ["ethiopian", "greek", "turkish", "german", "moroccan"]
OOV_LOCATIONS = ["hanoi", "seoul", "tokyo", "berlin", "lisbon"]
PRICES = ["cheap", "moderate", "expensive"]
SIZES = ["two", "four", "six", "eight"]

TASKS = {
    1: "API-calls",
    2: "API-refine",
    3: "options",
    4: "phone-address",
    5: "full-dialogs",
}

GREETINGS = ["hi", "hello", "good morning"]
REQUESTS = ["can you book a table", "i'd like to book a table", "may i have a table", "can you make a restaurant reservation"]
ASK = {
    "cuisine": "any preference on a type of cuisine",
    "location": "where should it be",
    "size": "how many people would be in your party",
    "price": "which price range are looking for",
}
ORDER = ["cuisine", "location", "size", "price"]
REJECTS = ["no this does not work for me", "do you have something else", "no i don't like that"]
ACCEPTS = ["let's do it", "that looks great", "i love that", "it's perfect"]
PHONE = ["may i have the phone number of the restaurant", "what is the phone number of the restaurant"]
ADDRESS = ["may i have the address of the restaurant", "do you have its address", "what is the address of the restaurant"]


def in_request(slot, v):
    return {
        "cuisine": f"with {v} food",
        "location": f"in {v}",
        "size": f"for {v} people",
        "price": f"in a {v} price range",
    }[slot]


def answer(rng, slot, v):
    return rng.choice({
        "cuisine": [f"{v} food", f"i love {v} food", f"with {v} cuisine"],
        "location": [f"{v} please", f"in {v}", v],
        "size": [f"for {v} please", f"we will be {v}", f"{v} people"],
        "price": [f"i am looking for a {v} restaurant", f"in a {v} price range please"],
    }[slot])


def update(rng, slot, v):
    return rng.choice({
        "cuisine": [f"instead could it be with {v} food", f"actually i would prefer with {v} food"],
        "location": [f"instead could it be in {v}", f"actually i would prefer in {v}"],
        "size": [f"instead could it be for {v} people", f"actually i would prefer for {v} people"],
        "price": [f"instead could it be in a {v} price range", f"actually i would prefer in a {v} price range"],
    }[slot])


class Dialog:
    def __init__(self):
        self.lines = []

    def turn(self, user, bot):
        self.lines.append(f"{user}\t{bot}")

    def kb(self, rows):
        self.lines.extend(f"{r} {a} {v}" for r, a, v in rows)

    def text(self):
        return "".join(f"{i} {line}\n" for i, line in enumerate(self.lines, 1)) + "\n"


def vocab(oov):
    return (OOV_CUISINES if oov else CUISINES), (OOV_LOCATIONS if oov else LOCATIONS)


def pick_slots(rng, oov):
    cuisines, locations = vocab(oov)
    return {
        "cuisine": rng.choice(cuisines),
        "location": rng.choice(locations),
        "size": rng.choice(SIZES),
        "price": rng.choice(PRICES),
    }


def api_call(s):
    return f"api_call {s['cuisine']} {s['location']} {s['size']} {s['price']}"


def restaurant(s, stars):
    name = f"resto_{s['location']}_{s['price']}_{s['cuisine']}_{stars}stars"
    rows = [
        (name, "R_phone", f"{name}_phone"),
        (name, "R_cuisine", s["cuisine"]),
        (name, "R_address", f"{name}_address"),
        (name, "R_location", s["location"]),
        (name, "R_number", s["size"]),
        (name, "R_price", s["price"]),
        (name, "R_rating", str(stars)),
    ]
    return name, rows


def collect(rng, d, s):
    """Greeting, request, slot questions and the api_call."""
    d.turn(rng.choice(GREETINGS), "hello what can i help you with today")
    told = [k for k in ORDER if rng.random() < 0.5]
    parts = [in_request(k, s[k]) for k in rng.sample(told, len(told))]
    d.turn(" ".join([rng.choice(REQUESTS)] + parts), "i'm on it")
    d_missing = [k for k in ORDER if k not in told]
    user = "<SILENCE>"
    for k in d_missing:
        d.turn(user, ASK[k])
        user = answer(rng, k, s[k])
    d.turn(user, "ok let me look into some options for you")
    d.turn("<SILENCE>", api_call(s))


def refine(rng, d, s, oov):
    cuisines, locations = vocab(oov)
    choices = {"cuisine": cuisines, "location": locations, "size": SIZES, "price": PRICES}
    for _ in range(rng.randint(1, 3)):
        k = rng.choice(ORDER)
        s[k] = rng.choice([v for v in choices[k] if v != s[k]])
        d.turn(update(rng, k, s[k]), "sure is there anything else to update")
    d.turn("no", "ok let me look into some options for you")
    d.turn("<SILENCE>", api_call(s))


def options(rng, d, s):
    stars = rng.sample(range(1, 9), rng.randint(2, 5))
    names = {}
    for st in stars:
        name, rows = restaurant(s, st)
        names[st] = name
        d.kb(rows)
    ranked = [names[st] for st in sorted(stars, reverse=True)]
    n_reject = rng.randint(0, len(ranked) - 1)
    user = "<SILENCE>"
    for i in range(n_reject):
        d.turn(user, f"what do you think of this option: {ranked[i]}")
        user = rng.choice(REJECTS)
        d.turn(user, "sure let me find an other option for you")
        user = "<SILENCE>"
    d.turn(user, f"what do you think of this option: {ranked[n_reject]}")
    d.turn(rng.choice(ACCEPTS), "great let me do the reservation")
    return ranked[n_reject]


def extra_info(rng, d, name):
    for kind in rng.sample(["phone", "address"], rng.randint(1, 2)):
        d.turn(rng.choice(PHONE if kind == "phone" else ADDRESS), f"here it is {name}_{kind}")
    d.turn("thanks", "is there anything i can help you with")
    d.turn("no thank you", "you're welcome")


def dialog(rng, task, oov):
    d = Dialog()
    s = pick_slots(rng, oov)
    if task == 1:
        collect(rng, d, s)
    elif task == 2:
        collect(rng, d, s)
        refine(rng, d, s, oov)
        d.turn("thank you", "you're welcome")
    elif task == 3:
        collect(rng, d, s)
        options(rng, d, s)
    elif task == 4:
        name, rows = restaurant(s, rng.randint(1, 8))
        d.kb(rows)
        d.turn(rng.choice(GREETINGS), "hello what can i help you with today")
        d.turn(f"can you book a table at {name}", "great let me do the reservation")
        extra_info(rng, d, name)
    else:
        collect(rng, d, s)
        if rng.random() < 0.5:
            refine(rng, d, s, oov)
        name = options(rng, d, s)
        extra_info(rng, d, name)
    return d.text()


def generate(out, seed=7, dialogs=20):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for task, name in TASKS.items():
        for oov in (False, True):
            rng = random.Random(seed * 1000 + 100 + task * 2 + oov)
            text = "".join(dialog(rng, task, oov) for _ in range(dialogs))
            suffix = "-OOV" if oov else ""
            (out / f"dialog-babi-task{task}-{name}-tst{suffix}.txt").write_text(text)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--dialogs", type=int, default=20)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "crates/core/data/smoke/dialog"))
    args = ap.parse_args()
    generate(args.out, args.seed, args.dialogs)


if __name__ == "__main__":
    main()
