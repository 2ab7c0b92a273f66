#!/usr/bin/env python
from setuptools import setup, find_packages


def read(filename):
    with open(filename, 'r') as f:
        return f.read()


def read_reqs(filename):
    return read(filename).strip().splitlines()


def install_requires():
    return read_reqs('etc/requirements.txt')


def extras_require():
    return {req: read_reqs('etc/requirements_%s.txt' % req)
            for req in {'test'}}


setup(name='shellflow',
      version='0.1.0',
      description='Fixed points, attractors and anomalous dissipation of '
                  'the viscous dyadic model',
      license='BSD',
      keywords='dyadic model shell model turbulence fixed point dissipation',
      packages=find_packages(),
      install_requires=install_requires(),
      extras_require=extras_require(),
      long_description=read('README.rst'),
      zip_safe=False,
      entry_points={'console_scripts': ['shellflow = shellflow.cli:main']})
