import importlib

from setuptools import (
    setup, find_packages
)

version = importlib.import_module('vaffine.version').version

with open('requirements.txt') as fh:
    requirements = fh.read() \
            .split()

setup(
    name='vaffine',
    version=version,
    license='BSD',
    description='Feedback synthesis and simulation for virtual affine '
                'nonholonomic constraints',
    long_description='See README.md',
    python_requires='>=3.8',
    install_requires=requirements,
    packages=find_packages(exclude=['tests', 'tests.*', 'examples*']),
    include_package_data=True,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Education',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics'
    ],
    entry_points={
        'console_scripts': [
            'vaffine = vaffine.cli:main'
        ]
    }
)
