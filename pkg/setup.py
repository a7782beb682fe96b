import setuptools
from typing import List
from pathlib import Path


with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()


def _parse_requirements(filename: str) -> List[str]:
    """Return requirements from requirements file."""
    lines = Path(__file__).with_name(filename).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith("#")]


setuptools.setup(
    name="shorpython",
    description="shorpython: Shor's algorithm on a 2n+3 qubit semiclassical circuit",
    keywords="shor, quantum, factoring, order finding, qft, python, shorpython",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests"]),
    python_requires=">=3.8",
    install_requires=_parse_requirements("requirements.txt"),
    extras_require={"test": ["pytest"], "docs": ["sphinx", "sphinx_rtd_theme"]},
    entry_points={
        "console_scripts": [
            "shorpython=shorpython.cli:main",
        ],
    },
)
