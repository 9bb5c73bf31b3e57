"""Install stegogan"""
# Copyright © 2024 The stegogan developers. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
# in compliance with the License. You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software distributed under the License
# is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
# or implied. See the License for the specific language governing permissions and limitations under
# the License.
from setuptools import find_packages, setup
import os
path = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(path, 'README.md')) as file:
    readme = file.read()

License = 'Apache-2.0'

# obtain current version
__version__ = None
with open(os.path.join(path, 'stegogan/__version__.py')) as f:
    lines = f.readlines()
__version__ = lines[-1].strip().split("'")[1].strip()

install_requires = [
    'torch>=2.0',
    'numpy',
    'scipy',
    'pyyaml',
    'Pillow',
    'tqdm',
]

extras_require = {
    'inception': ['torchvision'],
    'tests': ['pytest'],
    'docs': ['sphinx >= 1.4', 'nbsphinx', 'pygments', 'recommonmark', 'sphinx_rtd_theme'],
}

authors = 'The stegogan developers'


setup(name='stegogan',
      description='Non-bijective unpaired image-to-image translation with StegoGAN',
      version=__version__,
      long_description=readme,
      packages=find_packages(exclude=('tests', 'doc')),
      author=authors,
      license=License,
      python_requires='>=3.8',
      install_requires=install_requires,
      extras_require=extras_require,
      entry_points={'console_scripts': ['stegogan=stegogan.cli:main']},
      )
