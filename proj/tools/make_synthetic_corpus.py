#!/usr/bin/env python3
"""Generate the synthetic public-domain lyric corpus used by tests and demos.

Usage: make_synthetic_corpus.py OUT.jsonl

Output is deterministic. The corpus has exactly 50 verses and deliberately
includes the cases the preprocessing rules act on: repeated consecutive
lines, verses under six lines, six-line verses under fifty characters, a
Spanish-tagged song, and untagged songs in both languages.
"""
import json
import random
import sys

FAMILIES = {
    "ay": ["day", "way", "stay", "play", "say", "away", "today", "gray"],
    "ight": ["night", "light", "right", "fight", "tight", "bright", "sight", "tonight"],
    "ell": ["bell", "tell", "well", "fell", "shell", "spell", "sell"],
    "oo": ["you", "true", "do", "through", "blue", "new", "too"],
    "ove": ["love", "above", "glove", "dove", "of"],
    "ain": ["rain", "pain", "again", "chain", "train", "remain", "plain"],
    "ine": ["mine", "shine", "line", "fine", "sign", "divine", "wine"],
    "uin": ["doing", "ruin", "chewing", "brewing", "viewing", "pursuing"],
    "ocal": ["mobile", "local", "vocal", "global", "noble"],
    "ome": ["home", "roam", "foam", "comb", "dome", "chrome"],
}

OPENERS = [
    "I keep on thinking of the",
    "we were dancing in the",
    "don't you know that it's",
    "I spend my days just waiting for the",
    "tell me baby what you",
    "every time I close my eyes I see the",
    "hold me closer through the",
    "she said it's only",
    "we could run until the",
    "I got nothing left to",
    "you were always on my",
    "maybe we can find a",
    "turn the music up and",
    "all the stars are looking",
    "I never wanted to be",
    "there's a fire in the",
    "walking down the empty",
    "call me when you feel the",
    "nobody knows about the",
    "we were young and we were",
]

ARTISTS = [
    "The Lantern Hall", "June Halloway", "Static Orchard", "Miles Arden",
    "Neon Harbor", "Clara Vance", "The Quiet Engines", "Rosa Delgado",
]

SPANISH = [
    "bailamos toda la noche bajo la luna",
    "tu corazon es mi casa y mi camino",
    "no quiero perder el tiempo sin ti",
    "la ciudad se duerme y yo te espero",
    "cantamos juntos hasta el amanecer",
    "el viento sabe todo lo que siento",
    "y la lluvia cae sobre nuestro amor",
]


def rhyming_verse(rng, n_lines):
    lines = []
    while len(lines) < n_lines:
        fam = FAMILIES[rng.choice(sorted(FAMILIES))]
        for word in rng.sample(fam, 2):
            lines.append(f"{rng.choice(OPENERS)} {word}")
    return lines[:n_lines]


def main():
    rng = random.Random(2021)
    songs = []
    verses_left = 50

    def add_song(idx, artist, verses, language_tag="en"):
        nonlocal verses_left
        rec = {"id": f"song-{idx:03d}", "artist": artist,
               "title": f"Untitled {idx}", "verses": verses}
        if language_tag is not None:
            rec["language_tag"] = language_tag
        songs.append(rec)
        verses_left -= len(verses)

    idx = 1
    # Special-case songs first.
    chorus = rhyming_verse(rng, 6)
    chorus.insert(2, chorus[1])
    chorus.insert(3, chorus[1] + " oh")
    add_song(idx, ARTISTS[0], [rhyming_verse(rng, 8), chorus, rhyming_verse(rng, 4)])
    idx += 1
    add_song(idx, ARTISTS[1], [["oh", "yeah", "oh no", "hey", "la la", "go go go"],
                               rhyming_verse(rng, 7)])
    idx += 1
    add_song(idx, ARTISTS[2], [SPANISH[:6], SPANISH[1:]], language_tag="es")
    idx += 1
    add_song(idx, ARTISTS[3], [SPANISH[::-1][:6]], language_tag=None)
    idx += 1
    add_song(idx, ARTISTS[4], [rhyming_verse(rng, 6), rhyming_verse(rng, 9)], language_tag=None)
    idx += 1
    add_song(idx, ARTISTS[5], [
        ["don't you know that it's true", "I spend my days thinking of you",
         "nothing I can do", "I keep on doing", "my heart is in ruin",
         "oh my heart is in ruin", "we go on pursuing"],
        ["my phone is mobile", "but my love is local", "you sing it vocal",
         "we could go global", "and you were noble", "oh you were noble",
         "we were so mobile"]])
    idx += 1
    while verses_left > 0:
        n = min(verses_left, rng.randint(2, 4))
        verses = [rhyming_verse(rng, rng.randint(5, 10)) for _ in range(n)]
        if rng.random() < 0.3:
            v = verses[0]
            k = rng.randrange(len(v))
            v.insert(k + 1, v[k])
        add_song(idx, ARTISTS[idx % len(ARTISTS)], verses)
        idx += 1

    assert sum(len(s["verses"]) for s in songs) == 50
    with open(sys.argv[1], "w", encoding="utf-8") as f:
        for s in songs:
            f.write(json.dumps(s, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
