#!/usr/bin/env python3
"""Generate WordPiece conformance fixtures with the Hugging Face `tokenizers` library.

Two modes:

  trained (default)
      Trains a WordPiece vocabulary with the reference trainer on a seeded
      multilingual corpus, then tokenizes 1000 seeded test strings with it.
      Writes tests/fixtures/wordpiece_ref/{vocab.txt,conformance.jsonl}.

  --vocab PATH
      Uses an existing vocabulary (for example the 105,879-entry
      bert-base-multilingual-uncased vocab.txt) and writes
      tests/fixtures/mbert/{vocab.txt,conformance.jsonl}.

Each JSONL line is {"input": str, "tokens": [str, ...]} produced by
BertNormalizer(clean_text, handle_chinese_chars, lowercase) ->
BertPreTokenizer -> WordPiece(unk "[UNK]", "##", max 100 chars) with
add_special_tokens=False, so unknown tokens are kept.

Requires: pip install tokenizers
"""

import argparse
import json
import os
import random
import sys
import unicodedata

from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, trainers

SEED = 20240601
N_STRINGS = 1000

# Short seed sentences for the eleven benchmark languages plus a few extras.
SENTENCES = {
    "ar": ["ما هي عاصمة المملكة العربية السعودية؟", "كتب الطالب رسالة طويلة إلى معلمه.", "المكتبة مفتوحة من الساعة التاسعة صباحاً."],
    "bn": ["বাংলাদেশের রাজধানী কোথায়?", "রবীন্দ্রনাথ ঠাকুর নোবেল পুরস্কার পেয়েছিলেন।", "আমি প্রতিদিন সকালে চা পান করি।"],
    "en": ["Who wrote the novel Things Fall Apart?", "The river flows through three countries before reaching the sea.", "Résumé, naïve café & co-operate: don't panic!"],
    "fi": ["Mikä on Suomen pisin joki?", "Helsingin yliopisto perustettiin vuonna 1640.", "Äiti ostaa kaupasta leipää ja maitoa."],
    "id": ["Siapakah presiden pertama Indonesia?", "Gunung berapi itu meletus pada tahun 1883.", "Perpustakaan nasional menyimpan ribuan naskah kuno."],
    "ja": ["日本で一番高い山は何ですか？", "東京タワーは一九五八年に完成した。", "ひらがなとカタカナを勉強しています。"],
    "ko": ["대한민국의 수도는 어디입니까?", "세종대왕은 한글을 창제하였다.", "우리는 주말마다 공원에서 산책한다."],
    "ru": ["Какая самая длинная река в России?", "Лев Толстой написал роман «Война и мир».", "Ёжик бежал через поле к лесу."],
    "sw": ["Mji mkuu wa Tanzania ni upi?", "Mlima Kilimanjaro ndio mlima mrefu zaidi barani Afrika.", "Watoto wanacheza mpira uwanjani."],
    "te": ["భారతదేశ రాజధాని ఏది?", "తెలుగు ద్రావిడ భాషలలో ఒకటి.", "మేము ప్రతి రోజు పాఠశాలకు వెళ్తాము."],
    "th": ["เมืองหลวงของประเทศไทยคืออะไร", "แม่น้ำเจ้าพระยาไหลผ่านกรุงเทพมหานคร", "นักเรียนกำลังอ่านหนังสือในห้องสมุด"],
    "zh": ["中华人民共和国成立于一九四九年。", "长城是世界上最长的建筑之一。"],
    "el": ["Η Αθήνα είναι η πρωτεύουσα της Ελλάδας.", "Ο Σωκράτης ήταν φιλόσοφος."],
    "de": ["Straße, Größe und Übermaß sind schwierige Wörter.", "Die Hauptstadt Deutschlands ist Berlin."],
    "vi": ["Thủ đô của Việt Nam là Hà Nội.", "Tiếng Việt có sáu thanh điệu."],
}

# Character pools per script, used to synthesize words.
SCRIPT_RANGES = {
    "latin": [(0x61, 0x7A), (0x41, 0x5A), (0xC0, 0xFF), (0x100, 0x17F)],
    "arabic": [(0x621, 0x64A), (0x660, 0x669)],
    "bengali": [(0x985, 0x9B9), (0x9BE, 0x9CC), (0x9E6, 0x9EF)],
    "cyrillic": [(0x410, 0x44F), (0x401, 0x401), (0x451, 0x451)],
    "devanagari": [(0x905, 0x939), (0x93E, 0x94C)],
    "greek": [(0x391, 0x3A9), (0x3B1, 0x3C9), (0x3AC, 0x3AF)],
    "hangul": [(0xAC00, 0xAC00 + 400)],
    "hiragana": [(0x3041, 0x3096)],
    "katakana": [(0x30A1, 0x30FA)],
    "cjk": [(0x4E00, 0x4E00 + 600)],
    "telugu": [(0xC05, 0xC39), (0xC3E, 0xC4C), (0xC66, 0xC6F)],
    "thai": [(0xE01, 0xE30), (0xE31, 0xE3A), (0xE40, 0xE4E)],
    "digits": [(0x30, 0x39)],
}

PUNCT = list("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~") + ["«", "»", "、", "。", "¿", "¡", "—", "…", "·", "“", "”", "‘", "’", "।", "؟", "،"]
SYMBOLS = ["©", "®", "°", "±", "€", "£", "¥", "™", "→", "∑", "√", "♥", "☃", "😀", "🚀", "👍🏽"]
SPECIAL = [
    " ",  # no-break space (whitespace)
    "　",  # ideographic space
    "​",  # zero width space (Cf, removed)
    "­",  # soft hyphen (Cf, removed)
    "‍",  # zero width joiner (Cf, removed)
    "﻿",  # byte order mark (Cf, removed)
    "\u0007",  # bell (Cc, removed)
    "́",  # combining acute (Mn, stripped when lowercasing)
    "̈",  # combining diaeresis
    "�",  # replacement char (removed)
    "",  # private use (Co, removed)
    " ",  # em space
]
# Characters withheld from training so the test strings exercise [UNK].
UNSEEN = ["ʬ", "ǂ", "ꙮ", "𓀀", "ᚠ", "ᚢ", "ⴰ", "ꦄ", "Ꭰ", "ᐃ"]


def pool(script):
    chars = []
    for lo, hi in SCRIPT_RANGES[script]:
        for cp in range(lo, hi + 1):
            c = chr(cp)
            if unicodedata.category(c) != "Cn":
                chars.append(c)
    return chars


POOLS = {s: pool(s) for s in SCRIPT_RANGES}


def random_word(rng, script, max_len=9):
    n = rng.randint(1, max_len)
    return "".join(rng.choice(POOLS[script]) for _ in range(n))


def sentence_words(rng):
    lang = rng.choice(sorted(SENTENCES))
    return rng.choice(SENTENCES[lang]).split(" ")


def training_corpus(rng):
    lines = []
    for lang in sorted(SENTENCES):
        lines.extend(SENTENCES[lang] * 20)
    for _ in range(4000):
        script = rng.choice(sorted(SCRIPT_RANGES))
        words = [random_word(rng, script) for _ in range(rng.randint(3, 12))]
        if rng.random() < 0.3:
            words.append(rng.choice(PUNCT))
        lines.append(" ".join(words))
    return lines


def test_string(rng, i):
    kind = i % 10
    parts = []
    if kind == 0:
        # A long word that exceeds the per-word character limit.
        script = rng.choice(["latin", "cyrillic", "thai", "hangul"])
        parts.append("".join(rng.choice(POOLS[script]) for _ in range(rng.randint(95, 130))))
        parts.extend(sentence_words(rng)[:3])
    elif kind == 1:
        parts.append(rng.choice(UNSEEN) + random_word(rng, "latin", 4))
        parts.extend(sentence_words(rng))
    else:
        n = rng.randint(1, 14)
        for _ in range(n):
            r = rng.random()
            if r < 0.35:
                w = rng.choice(sentence_words(rng))
            elif r < 0.7:
                w = random_word(rng, rng.choice(sorted(SCRIPT_RANGES)))
            elif r < 0.8:
                w = rng.choice(PUNCT)
            elif r < 0.85:
                w = rng.choice(SYMBOLS)
            elif r < 0.95:
                w = random_word(rng, "latin", 5) + rng.choice(SPECIAL) + random_word(rng, "latin", 5)
            else:
                w = rng.choice(UNSEEN)
            if rng.random() < 0.3:
                w = w.upper()
            parts.append(w)
    sep = rng.choice([" ", " ", " ", "  ", " ", "　", " ​"])
    s = sep.join(parts)
    if rng.random() < 0.1:
        s = " " + s + " "
    return unicodedata.normalize("NFC", s) if rng.random() < 0.5 else s


def build_tokenizer(vocab):
    tok = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]", max_input_chars_per_word=100))
    tok.normalizer = normalizers.BertNormalizer(
        clean_text=True, handle_chinese_chars=True, strip_accents=None, lowercase=True
    )
    tok.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    return tok


def train_vocab(rng, size):
    tok = Tokenizer(models.WordPiece(unk_token="[UNK]", max_input_chars_per_word=100))
    tok.normalizer = normalizers.BertNormalizer(
        clean_text=True, handle_chinese_chars=True, strip_accents=None, lowercase=True
    )
    tok.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    trainer = trainers.WordPieceTrainer(
        vocab_size=size, min_frequency=2, special_tokens=["[UNK]"], continuing_subword_prefix="##", show_progress=False
    )
    tok.train_from_iterator(training_corpus(rng), trainer=trainer)
    vocab = tok.get_vocab()
    return [t for t, _ in sorted(vocab.items(), key=lambda kv: kv[1])]


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    ap = argparse.ArgumentParser()
    ap.add_argument("--vocab", help="existing vocab.txt (e.g. mBERT uncased)")
    ap.add_argument("--size", type=int, default=6000, help="trained vocabulary size")
    ap.add_argument("--out", help="output directory")
    args = ap.parse_args()

    rng = random.Random(SEED)
    if args.vocab:
        with open(args.vocab, encoding="utf-8") as f:
            entries = [l.rstrip("\n").rstrip("\r") for l in f]
        out = args.out or os.path.join(here, "..", "tests", "fixtures", "mbert")
    else:
        entries = train_vocab(rng, args.size)
        out = args.out or os.path.join(here, "..", "tests", "fixtures", "wordpiece_ref")
    os.makedirs(out, exist_ok=True)

    vocab = {t: i for i, t in enumerate(entries)}
    tok = build_tokenizer(vocab)

    test_rng = random.Random(SEED + 1)
    with open(os.path.join(out, "vocab.txt"), "w", encoding="utf-8", newline="\n") as f:
        for e in entries:
            f.write(e + "\n")
    with open(os.path.join(out, "conformance.jsonl"), "w", encoding="utf-8", newline="\n") as f:
        for i in range(N_STRINGS):
            s = test_string(test_rng, i)
            tokens = tok.encode(s, add_special_tokens=False).tokens
            f.write(json.dumps({"input": s, "tokens": tokens}, ensure_ascii=False) + "\n")
    print(f"wrote {len(entries)} vocab entries and {N_STRINGS} strings to {os.path.normpath(out)}", file=sys.stderr)


if __name__ == "__main__":
    main()
