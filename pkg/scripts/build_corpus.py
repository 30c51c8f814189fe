"""Regenerate the shipped corpus documents from the model builders."""

from pathlib import Path

from hptk.document import MONOMIAL, from_presentation
from hptk.models import CORPUS

OUT = Path(__file__).resolve().parents[1] / "src" / "hptk" / "corpus"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, build in CORPUS.items():
        doc = from_presentation(build(), inner_product=MONOMIAL)
        (OUT / f"{name}.json").write_text(doc.serialize(), encoding="utf-8")
        print(name, len(doc.data["basis"]))


if __name__ == "__main__":
    main()
