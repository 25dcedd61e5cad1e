"""Writes a tiny randomly initialised BERT and its reference outputs.

The C++ encoder is checked against these: token ids must match
BertTokenizer (uncased) and every hidden layer must match BertModel.

    python3 tests/tools/make_tiny_bert.py tests/fixtures/tiny_bert
"""
import json
import sys
from pathlib import Path

import torch
from transformers import BertConfig, BertModel, BertTokenizer

WORDS = """the a an and of to in is you are what do know how story ends first faust
here tv shows by hugh griffith griffiths play beyonce come right back please i have
head headache am bit overwhelmed okay nine thirty five trying say me ##s ##ache ##ing
##ed cafe over ##whelm ##y hello world , . ? ! ' : 9 30""".split()

SENTENCES = [
    "play Beyoncé",
    "play Beyonce",
    "Here are TV shows by Hugh Griffiths",
    "Faust, do you know how the story ends?",
    "I have a headache",
    "Okay 9:30 five",
    "overwhelmingly cafés zzz",
    "",
]


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + WORDS
    (out / "vocab.txt").write_text("\n".join(vocab) + "\n")

    torch.manual_seed(20240607)
    config = BertConfig(vocab_size=len(vocab), hidden_size=32, num_hidden_layers=3,
                        num_attention_heads=4, intermediate_size=64,
                        max_position_embeddings=40, type_vocab_size=2)
    model = BertModel(config, add_pooling_layer=False).eval()
    # Break the default zero biases / unit LayerNorm so every parameter matters.
    with torch.no_grad():
        for p in model.parameters():
            p.add_(0.05 * torch.randn_like(p))
    model.save_pretrained(out, safe_serialization=True)

    tok = BertTokenizer(str(out / "vocab.txt"), do_lower_case=True)
    cases = []
    for s in SENTENCES:
        enc = tok(s, return_tensors="pt")
        with torch.no_grad():
            hs = model(**enc, output_hidden_states=True).hidden_states
        cases.append({
            "text": s,
            "tokens": tok.convert_ids_to_tokens(enc["input_ids"][0]),
            "ids": enc["input_ids"][0].tolist(),
            "hidden_states": [h[0].tolist() for h in hs],
        })
    (out / "expected.json").write_text(json.dumps({"cases": cases}))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/tiny_bert")
