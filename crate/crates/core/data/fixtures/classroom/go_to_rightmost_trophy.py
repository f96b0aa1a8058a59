def execute_command(image):
    image_patch = ImagePatch(image)
    trophy_patches = image_patch.find('trophy')
    if len(trophy_patches) == 0:
        return {'function': 'None', 'error': 'No trophy found.'}
    trophy_patches.sort(key=lambda x: x.horizontal_center)
    rightmost_trophy = trophy_patches[-1]
    return {'function': 'navigate_to_object', 'inputs': (rightmost_trophy.horizontal_center, rightmost_trophy.vertical_center), 'box': [rightmost_trophy.left, rightmost_trophy.lower, rightmost_trophy.right, rightmost_trophy.upper]}
