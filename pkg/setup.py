from setuptools import setup, find_packages

setup(
    name="femforge",
    version="0.1.0",
    packages=find_packages(exclude=["femforge.tests"]),
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "jinja2>=3.0",
        "python-dotenv==1.1.0",
        "pydantic>=2.0",
    ],
    entry_points={
        "console_scripts": [
            "femforge=femforge.cli.commands:run",
        ],
    },
)
