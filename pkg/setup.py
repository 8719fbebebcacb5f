from setuptools import setup, find_packages

setup(
    name="nevdodge",
    packages=find_packages(exclude=["tests", "scripts"]),
    install_requires=[
        "numpy",
        "pandas >= 2.0.0",
        "scipy",
        "matplotlib",
        "ruamel.yaml",
        "tqdm",
    ],
    extras_require={"dev": ["pylint", "black", "pytest"]},
    entry_points={"console_scripts": ["nevdodge = nevdodge.cli:main"]},
)
