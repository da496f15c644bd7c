"""
Setup script for the nested-sum engine
"""
from setuptools import setup, find_packages
from pathlib import Path

# Read README for long description
readme_path = Path(__file__).parent / "README.md"
long_description = readme_path.read_text() if readme_path.exists() else ""

# Read requirements
requirements_path = Path(__file__).parent / "requirements.txt"
requirements = []
if requirements_path.exists():
    requirements = [line for line in requirements_path.read_text().strip().split('\n')
                    if line and not line.startswith('pytest')]

setup(
    name="nestsum",
    version="1.0.0",
    description="Symbolic summation of nested sums and epsilon expansion of hypergeometric functions",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["src", "src.*"]),
    package_data={"src.algebra": ["data/*.txt"]},
    install_requires=requirements,
    extras_require={
        'dev': [
            'pytest>=7.0.0',
            'black>=22.0.0',
            'flake8>=4.0.0',
        ]
    },
    entry_points={
        'console_scripts': [
            'nestsum=src.main:main',
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.10",
    keywords="nested sums, harmonic sums, multiple polylogarithms, hypergeometric, epsilon expansion",
)
