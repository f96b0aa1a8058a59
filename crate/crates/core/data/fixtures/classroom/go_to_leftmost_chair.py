def execute_command(image):
    image_patch = ImagePatch(image)
    chair_patches = image_patch.find('chair')
    if len(chair_patches) == 0:
        return {'function': 'None', 'error': 'No chair found.'}
    chair_patches.sort(key=lambda x: x.horizontal_center)
    leftmost_chair = chair_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (leftmost_chair.horizontal_center, leftmost_chair.vertical_center), 'box': [leftmost_chair.left, leftmost_chair.lower, leftmost_chair.right, leftmost_chair.upper]}
