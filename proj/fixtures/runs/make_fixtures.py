#!/usr/bin/env python3
"""Regenerates proposed_run1.jsonl: one curated graph per benchmark prompt.

Each raw_output is a correct solution in the proposed representation, wrapped
the way chat models tend to wrap JSON (bare, fenced, or with prose around it)
so the extractor is exercised too.  request_hash is omitted: these are
curated outputs, not recorded API responses.
"""

import json


class Graph:
    def __init__(self):
        self.nodes = {}
        self.edges = []

    def node(self, node_id, name, value=None):
        entry = {"name": name}
        if value is not None:
            entry["value"] = value
        self.nodes["node_" + node_id] = entry
        return "node_" + node_id

    def const(self, node_id, value):
        return self.node(node_id, "Constant", value)

    def edge(self, out_node, out_port, in_node, in_port):
        self.edges.append({
            "outNodeID": out_node, "outPortID": out_port,
            "inNodeID": in_node, "inPortID": in_port,
        })

    def wire(self, out_node, in_node, in_port):
        """Constant or reporter VALUE into a value port or field."""
        port = "VALUE" if self.nodes[out_node]["name"] == "Constant" else "VALUE"
        self.edge(out_node, port, in_node, in_port)

    def then(self, a, b):
        self.edge(a, "THEN", b, "EXEC")

    def substack(self, a, b, port="SUBSTACK"):
        self.edge(a, port, b, "EXEC")

    def dump(self):
        return json.dumps({"nodes": self.nodes, "edges": self.edges}, indent=2)


def prompt_one():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    loop = g.node("loop", "RepeatUntil")
    key = g.node("key", "KeyPressed")
    keyname = g.const("keyname", "space")
    move = g.node("move", "MoveSteps")
    steps = g.const("steps", 50)
    turn = g.node("turn", "TurnRight")
    degrees = g.const("degrees", 90)
    g.then(flag, loop)
    g.wire(key, loop, "CONDITION")
    g.wire(keyname, key, "KEY")
    g.substack(loop, move)
    g.wire(steps, move, "STEPS")
    g.then(move, turn)
    g.wire(degrees, turn, "DEGREES")
    return g


def prompt_two():
    g = Graph()
    hat = g.node("hat", "WhenKeyPressed")
    keyname = g.const("keyname", "r")
    set_size = g.node("setsize", "SetSizeTo")
    rand = g.node("rand", "Random")
    lo = g.const("lo", 50)
    hi = g.const("hi", 150)
    g.wire(keyname, hat, "KEY")
    g.then(hat, set_size)
    g.wire(rand, set_size, "SIZE")
    g.wire(lo, rand, "FROM")
    g.wire(hi, rand, "TO")
    return g


def prompt_three():
    g = Graph()
    hat = g.node("hat", "WhenKeyPressed")
    keyname = g.const("keyname", "s")
    say = g.node("say", "Say")
    alphabet = g.const("alphabet", "abcdefghijklmnopqrstuvwxyz")
    one = g.const("one", 1)
    twentysix = g.const("twentysix", 26)
    zero = g.const("zero", 0)
    nine = g.const("nine", 9)
    password = g.node("password", "Join")
    letters = g.node("letters", "Join")
    digits = g.node("digits", "Join")
    digitstail = g.node("digitstail", "Join")
    g.wire(keyname, hat, "KEY")
    g.then(hat, say)
    g.wire(password, say, "MESSAGE")
    g.wire(letters, password, "STRING1")
    g.wire(digits, password, "STRING2")
    for tag, port in [("lettera", "STRING1"), ("letterb", "STRING2")]:
        rand = g.node("rand" + tag, "Random")
        letter = g.node(tag, "LetterOf")
        g.wire(one, rand, "FROM")
        g.wire(twentysix, rand, "TO")
        g.wire(rand, letter, "LETTER")
        g.wire(alphabet, letter, "STRING")
        g.wire(letter, letters, port)
    for tag, target, port in [("digita", digits, "STRING1"),
                              ("digitb", digitstail, "STRING1"),
                              ("digitc", digitstail, "STRING2")]:
        rand = g.node("rand" + tag, "Random")
        g.wire(zero, rand, "FROM")
        g.wire(nine, rand, "TO")
        g.wire(rand, target, port)
    g.wire(digitstail, digits, "STRING2")
    return g


def prompt_four():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    init = g.node("init", "SetVariable")
    name = g.const("name", "progress")
    zero = g.const("zero", 0)
    loop = g.node("loop", "Repeat")
    times = g.const("times", 5)
    bump = g.node("bump", "ChangeVariableBy")
    step = g.const("step", 20)
    say = g.node("say", "Say")
    get = g.node("get", "GetVariable")
    g.then(flag, init)
    g.wire(name, init, "VARIABLE")
    g.wire(zero, init, "VALUE")
    g.then(init, loop)
    g.wire(times, loop, "TIMES")
    g.substack(loop, bump)
    g.wire(name, bump, "VARIABLE")
    g.wire(step, bump, "VALUE")
    g.then(bump, say)
    g.wire(get, say, "MESSAGE")
    g.wire(name, get, "VARIABLE")
    return g


def prompt_five():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    loop = g.node("loop", "RepeatUntil")
    key = g.node("key", "KeyPressed")
    keyname = g.const("keyname", "q")
    hop = g.node("hop", "GoToRandom")
    g.then(flag, loop)
    g.wire(key, loop, "CONDITION")
    g.wire(keyname, key, "KEY")
    g.substack(loop, hop)
    return g


def prompt_six():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    loop = g.node("loop", "Forever")
    move = g.node("move", "MoveSteps")
    steps = g.const("steps", 50)
    turn = g.node("turn", "TurnRight")
    degrees = g.const("degrees", 45)
    g.then(flag, loop)
    g.substack(loop, move)
    g.wire(steps, move, "STEPS")
    g.then(move, turn)
    g.wire(degrees, turn, "DEGREES")
    return g


def prompt_seven():
    g = Graph()
    hat = g.node("hat", "WhenKeyPressed")
    keyname = g.const("keyname", "down arrow")
    shrink = g.node("shrink", "ChangeSizeBy")
    amount = g.const("amount", -10)
    g.wire(keyname, hat, "KEY")
    g.then(hat, shrink)
    g.wire(amount, shrink, "CHANGE")
    return g


def prompt_eight():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    loop = g.node("loop", "RepeatUntil")
    gt = g.node("gt", "GreaterThan")
    xpos = g.node("xpos", "XPosition")
    limit = g.const("limit", 150)
    move = g.node("move", "MoveSteps")
    steps = g.const("steps", 10)
    g.then(flag, loop)
    g.wire(gt, loop, "CONDITION")
    g.wire(xpos, gt, "OPERAND1")
    g.wire(limit, gt, "OPERAND2")
    g.substack(loop, move)
    g.wire(steps, move, "STEPS")
    return g


def prompt_nine():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    say = g.node("say", "Say")
    join = g.node("join", "Join")
    prefix = g.const("prefix", "X is ")
    xpos = g.node("xpos", "XPosition")
    g.then(flag, say)
    g.wire(join, say, "MESSAGE")
    g.wire(prefix, join, "STRING1")
    g.wire(xpos, join, "STRING2")
    return g


def prompt_ten():
    g = Graph()
    hat = g.node("hat", "WhenKeyPressed")
    keyname = g.const("keyname", "d")
    setx = g.node("setx", "SetXTo")
    xval = g.const("xval", 30)
    sety = g.node("sety", "SetYTo")
    yval = g.const("yval", 6)
    g.wire(keyname, hat, "KEY")
    g.then(hat, setx)
    g.wire(xval, setx, "X")
    g.then(setx, sety)
    g.wire(yval, sety, "Y")
    return g


def prompt_eleven():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    init = g.node("init", "SetVariable")
    name = g.const("name", "steps")
    start = g.const("start", 10)
    loop = g.node("loop", "Repeat")
    times = g.const("times", 5)
    move = g.node("move", "MoveSteps")
    get = g.node("get", "GetVariable")
    turn = g.node("turn", "TurnRight")
    degrees = g.const("degrees", 20)
    grow = g.node("grow", "ChangeVariableBy")
    delta = g.const("delta", 5)
    g.then(flag, init)
    g.wire(name, init, "VARIABLE")
    g.wire(start, init, "VALUE")
    g.then(init, loop)
    g.wire(times, loop, "TIMES")
    g.substack(loop, move)
    g.wire(get, move, "STEPS")
    g.wire(name, get, "VARIABLE")
    g.then(move, turn)
    g.wire(degrees, turn, "DEGREES")
    g.then(turn, grow)
    g.wire(name, grow, "VARIABLE")
    g.wire(delta, grow, "VALUE")
    return g


def prompt_twelve():
    # no size reporter exists, so compare the sprite's known starting size
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    cond = g.node("cond", "If")
    gt = g.node("gt", "GreaterThan")
    size = g.const("size", 100)
    limit = g.const("limit", 100)
    say = g.node("say", "Say")
    msg = g.const("msg", "Too big!")
    g.then(flag, cond)
    g.wire(gt, cond, "CONDITION")
    g.wire(size, gt, "OPERAND1")
    g.wire(limit, gt, "OPERAND2")
    g.substack(cond, say)
    g.wire(msg, say, "MESSAGE")
    return g


def prompt_thirteen():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    say = g.node("say", "Say")
    alphabet = g.const("alphabet", "abcdefghijklmnopqrstuvwxyz")
    one = g.const("one", 1)
    twentysix = g.const("twentysix", 26)
    space = g.const("space", " ")
    sentence = g.node("sentence", "Join")
    resta = g.node("resta", "Join")
    restb = g.node("restb", "Join")
    restc = g.node("restc", "Join")
    g.then(flag, say)
    g.wire(sentence, say, "MESSAGE")

    def word(tag):
        join = g.node("word" + tag, "Join")
        for sub, port in [("a", "STRING1"), ("b", "STRING2")]:
            rand = g.node("rand" + tag + sub, "Random")
            letter = g.node("letter" + tag + sub, "LetterOf")
            g.wire(one, rand, "FROM")
            g.wire(twentysix, rand, "TO")
            g.wire(rand, letter, "LETTER")
            g.wire(alphabet, letter, "STRING")
            g.wire(letter, join, port)
        return join

    g.wire(word("one"), sentence, "STRING1")
    g.wire(resta, sentence, "STRING2")
    g.wire(space, resta, "STRING1")
    g.wire(restb, resta, "STRING2")
    g.wire(word("two"), restb, "STRING1")
    g.wire(restc, restb, "STRING2")
    g.wire(space, restc, "STRING1")
    g.wire(word("three"), restc, "STRING2")
    return g


def prompt_fourteen():
    g = Graph()
    hat = g.node("hat", "WhenKeyPressed")
    keyname = g.const("keyname", "r")
    say = g.node("say", "Say")
    rand = g.node("rand", "Random")
    lo = g.const("lo", 1)
    hi = g.const("hi", 6)
    g.wire(keyname, hat, "KEY")
    g.then(hat, say)
    g.wire(rand, say, "MESSAGE")
    g.wire(lo, rand, "FROM")
    g.wire(hi, rand, "TO")
    return g


def prompt_fifteen():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    init = g.node("init", "SetVariable")
    name = g.const("name", "count")
    zero = g.const("zero", 0)
    first = g.node("first", "SayForSecs")
    get = g.node("get", "GetVariable")
    pace = g.const("pace", 0.05)
    loop = g.node("loop", "Repeat")
    times = g.const("times", 100)
    bump = g.node("bump", "ChangeVariableBy")
    one = g.const("one", 1)
    saynum = g.node("saynum", "SayForSecs")
    g.then(flag, init)
    g.wire(name, init, "VARIABLE")
    g.wire(zero, init, "VALUE")
    g.then(init, first)
    g.wire(get, first, "MESSAGE")
    g.wire(pace, first, "SECS")
    g.wire(name, get, "VARIABLE")
    g.then(first, loop)
    g.wire(times, loop, "TIMES")
    g.substack(loop, bump)
    g.wire(name, bump, "VARIABLE")
    g.wire(one, bump, "VALUE")
    g.then(bump, saynum)
    g.wire(get, saynum, "MESSAGE")
    g.wire(pace, saynum, "SECS")
    return g


def prompt_sixteen():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    loop = g.node("loop", "Repeat")
    times = g.const("times", 3)
    grow = g.node("grow", "ChangeSizeBy")
    up = g.const("up", 10)
    shrink = g.node("shrink", "ChangeSizeBy")
    down = g.const("down", -10)
    g.then(flag, loop)
    g.wire(times, loop, "TIMES")
    g.substack(loop, grow)
    g.wire(up, grow, "CHANGE")
    g.then(grow, shrink)
    g.wire(down, shrink, "CHANGE")
    return g


def prompt_seventeen():
    g = Graph()
    hat = g.node("hat", "WhenKeyPressed")
    keyname = g.const("keyname", "left arrow")
    slide = g.node("slide", "ChangeXBy")
    amount = g.const("amount", -20)
    say = g.node("say", "Say")
    msg = g.const("msg", "Going left!")
    g.wire(keyname, hat, "KEY")
    g.then(hat, slide)
    g.wire(amount, slide, "DX")
    g.then(slide, say)
    g.wire(msg, say, "MESSAGE")
    return g


def prompt_eighteen():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    wait = g.node("wait", "WaitUntil")
    key = g.node("key", "KeyPressed")
    keyname = g.const("keyname", "a")
    jump = g.node("jump", "GotoXY")
    origin = g.const("origin", 0)
    g.then(flag, wait)
    g.wire(key, wait, "CONDITION")
    g.wire(keyname, key, "KEY")
    g.then(wait, jump)
    g.wire(origin, jump, "X")
    g.wire(origin, jump, "Y")
    return g


def prompt_nineteen():
    g = Graph()
    flag = g.node("flag", "WhenFlagClicked")
    loop = g.node("loop", "Forever")
    tick = g.node("tick", "Say")
    tickmsg = g.const("tickmsg", "Tick")
    tock = g.node("tock", "Say")
    tockmsg = g.const("tockmsg", "Tock")
    g.then(flag, loop)
    g.substack(loop, tick)
    g.wire(tickmsg, tick, "MESSAGE")
    g.then(tick, tock)
    g.wire(tockmsg, tock, "MESSAGE")
    return g


def prompt_twenty():
    g = Graph()
    hat = g.node("hat", "WhenKeyPressed")
    keyname = g.const("keyname", "x")
    pick = g.node("pick", "IfElse")
    eq = g.node("eq", "Equals")
    rand = g.node("rand", "Random")
    lo = g.const("lo", 1)
    hi = g.const("hi", 2)
    saya = g.node("saya", "Say")
    worda = g.const("worda", "apple")
    sayb = g.node("sayb", "Say")
    wordb = g.const("wordb", "banana")
    g.wire(keyname, hat, "KEY")
    g.then(hat, pick)
    g.wire(eq, pick, "CONDITION")
    g.wire(rand, eq, "OPERAND1")
    g.wire(lo, eq, "OPERAND2")
    g.wire(lo, rand, "FROM")
    g.wire(hi, rand, "TO")
    g.substack(pick, saya)
    g.wire(worda, saya, "MESSAGE")
    g.substack(pick, sayb, "SUBSTACK2")
    g.wire(wordb, sayb, "MESSAGE")
    return g


BUILDERS = [
    prompt_one, prompt_two, prompt_three, prompt_four, prompt_five,
    prompt_six, prompt_seven, prompt_eight, prompt_nine, prompt_ten,
    prompt_eleven, prompt_twelve, prompt_thirteen, prompt_fourteen,
    prompt_fifteen, prompt_sixteen, prompt_seventeen, prompt_eighteen,
    prompt_nineteen, prompt_twenty,
]


def wrap(prompt_id, text):
    """Vary the packaging the way chat transcripts do."""
    style = prompt_id % 3
    if style == 0:
        return text
    if style == 1:
        return "```json\n" + text + "\n```"
    return ("Here is the graph for this task.\n\n```json\n" + text +
            "\n```\n\nEvery edge is listed once in the edges array.")


def main():
    lines = []
    for prompt_id, build in enumerate(BUILDERS, start=1):
        raw = wrap(prompt_id, build().dump())
        lines.append(json.dumps({"prompt_id": prompt_id, "raw_output": raw}))
    with open("proposed_run1.jsonl", "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} fixtures")


if __name__ == "__main__":
    main()
