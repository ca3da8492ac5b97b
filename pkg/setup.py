from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="eulerboundary",
    version="0.1.0",
    author="Eulerboundary Team",
    description="Exact computation and simulation of the boundary of the Eulerian triangle",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "sympy>=1.10",
    ],
    extras_require={
        "dev": ["pytest>=7.0", "pytest-cov>=4.0", "hypothesis>=6.0"],
    },
    entry_points={
        "console_scripts": [
            "eulerboundary=eulerboundary.cli:main",
        ],
    },
)
