#!/usr/bin/env python3
"""Write the bundled IPA pronouncing dictionary from the CMU Pronouncing Dictionary.

Usage: convert_cmudict.py OUT.tsv

Requires the `cmudict` pip package. Only the first pronunciation of every
entry is kept. Output lines are `word<TAB>space-separated IPA phonemes`, with
`ˈ` / `ˌ` prefixes on primary / secondary stressed nuclei.
"""
import sys

import cmudict

ARPABET = {
    "AA": "ɑ", "AE": "æ", "AH": "ʌ", "AO": "ɔ", "AW": "aʊ", "AY": "aɪ",
    "EH": "ɛ", "ER": "ɝ", "EY": "eɪ", "IH": "ɪ", "IY": "i", "OW": "oʊ",
    "OY": "ɔɪ", "UH": "ʊ", "UW": "u",
    "B": "b", "CH": "tʃ", "D": "d", "DH": "ð", "F": "f", "G": "ɡ",
    "HH": "h", "JH": "dʒ", "K": "k", "L": "l", "M": "m", "N": "n",
    "NG": "ŋ", "P": "p", "R": "ɹ", "S": "s", "SH": "ʃ", "T": "t",
    "TH": "θ", "V": "v", "W": "w", "Y": "j", "Z": "z", "ZH": "ʒ",
}
UNSTRESSED = {"AH": "ə", "ER": "ɚ"}


def to_ipa(arpa):
    out = []
    for ph in arpa:
        base, stress = (ph[:-1], ph[-1]) if ph[-1].isdigit() else (ph, None)
        sym = ARPABET[base]
        if stress == "0" and base in UNSTRESSED:
            sym = UNSTRESSED[base]
        if stress == "1":
            sym = "ˈ" + sym
        elif stress == "2":
            sym = "ˌ" + sym
        out.append(sym)
    return " ".join(out)


def main():
    entries = cmudict.dict()
    with open(sys.argv[1], "w", encoding="utf-8") as f:
        for word in sorted(entries):
            if "\t" in word or " " in word:
                continue
            f.write(f"{word}\t{to_ipa(entries[word][0])}\n")


if __name__ == "__main__":
    main()
