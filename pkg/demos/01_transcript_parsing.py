"""Parsing CHAT transcripts: tiers, annotation codes, morphology.

Run:  python demos/01_transcript_parsing.py
"""

from langprofile import parse_chat, strip_annotations

SAMPLE = """\
@Begin
@Participants:\tCHI Marta Target_Child, EXA Lee Examiner
@ID:\teng|demo|CHI|5;08.|female|TD||Target_Child|||
@PID:\tdemo-001
*EXA:\twhat happened in the story ?
*CHI:\t&-um the frog <jumped out> [//] jumped away .
%mor:\tdet:art|the n|frog v|jump-PAST adv|away .
*CHI:\the goed [*] home . [+ gram]
%mor:\tpro|he v|go-PAST adv|home .
*CHI:\tthe dog was sad +...
@End
"""


def main():
    t = parse_chat(SAMPLE)
    print(f"transcript {t.id}: corpus={t.corpus} group={t.group.name} "
          f"age={t.age_months}mo sex={t.sex}")
    print()
    for i, u in enumerate(t.utterances, 1):
        print(f"utterance {i} ({u.speaker.name}, ends with {u.terminator.name})")
        print(f"  raw   : {' '.join(u.raw_tokens)}")
        print(f"  clean : {' '.join(u.clean_tokens)}")
        if u.events.total():
            print(f"  events: {u.events}")
        if u.postcodes:
            print(f"  postcodes: {u.postcodes}")
        if u.mor_tokens:
            rendered = " ".join(m.render() for m in u.mor_tokens)
            print(f"  mor   : {rendered}")
    print()

    # the annotation stripper is usable on its own
    tokens = ["&-uh", "<the", "big", "dog>", "[/]", "the", "dog", "ran"]
    clean, events = strip_annotations(tokens)
    print(f"strip_annotations({tokens})")
    print(f"  -> {list(clean)}, {events}")


if __name__ == "__main__":
    main()
